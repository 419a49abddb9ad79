#ifndef WSETLAB_RISK_HPP
#define WSETLAB_RISK_HPP

#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "wsetlab/distribution.hpp"
#include "wsetlab/young.hpp"

namespace wsetlab {

/// Law-invariant risk functionals. Random variables are never
/// materialized: everything acts on the law through the quantile
/// representation X = F^{<-}(U). Sign convention: losses are negative
/// values of X, so the risk of the constant c is -c.
class RiskFunctionalSpec {
 public:
  struct Distortion {
    // Concave nondecreasing on [0,1] with g(0)=0, g(1)=1.
    std::function<double(double)> g;
    std::string label;
  };
  struct AVaR {
    double alpha;  // in (0,1)
  };
  struct Shortfall {
    YoungFunction young;
    double x0;  // > 0
  };
  struct OneSidedMoment {
    double p;  // >= 1
  };
  using Form = std::variant<Distortion, AVaR, Shortfall, OneSidedMoment>;

  static RiskFunctionalSpec avar(double alpha);
  /// The tail-mean distortion g(t) = min(t/alpha, 1); same functional as
  /// avar() but evaluated through the cdf-integral route. Kept as an
  /// independent algebraic path for cross-checks.
  static RiskFunctionalSpec distortion_avar(double alpha);
  static RiskFunctionalSpec shortfall(YoungFunction young, double x0);
  static RiskFunctionalSpec one_sided_moment(double p);

  const Form& form() const { return form_; }
  /// Young function whose Orlicz heart is the natural domain.
  YoungFunction domain_young() const;
  std::string describe() const;

 private:
  explicit RiskFunctionalSpec(Form f) : form_(std::move(f)) {}
  Form form_;
};

struct OrliczProbe {
  double c = 0.0;
  bool finite = false;
  double value = 0.0;
};

struct OrliczMembershipReport {
  std::vector<OrliczProbe> probes;
  bool member = false;
  // Finitely many probes cannot certify "for all c"; this stays true.
  bool evidence_only = true;
};

/// Checks E[young(c|X|)] < infinity at each probe (default c = 1,2,8,64).
OrliczMembershipReport orlicz_heart_member(
    const Distribution& mu, const YoungFunction& young,
    const std::vector<double>& probes = {1.0, 2.0, 8.0, 64.0});

/// Luxemburg norm inf{lambda > 0 : E[young(|X|/lambda)] <= 1} of the law
/// mu; bisection to 1e-9.
double luxemburg_norm(const Distribution& mu, const YoungFunction& young);

double eval_risk(const RiskFunctionalSpec& spec, const Distribution& mu);

/// Luxemburg norm of F_mu^{<-}(U) - F_nu^{<-}(U) for U uniform on (0,1).
double quantile_coupling_norm(const Distribution& mu, const Distribution& nu,
                              const YoungFunction& young);

struct SdwnRow {
  int n = 0;
  double luxemburg = 0.0;
  double psi_metric = 0.0;
};

struct SdwnReport {
  std::vector<SdwnRow> rows;
  double tol = 0.0;
  bool norm_converges = false;
  bool metric_converges = false;
  bool equivalent = false;  // both converge or neither
};

/// Tabulates the quantile-coupling norm against the gauge-weighted metric
/// (gauges young(k|.|)) along mu_n -> limit; the two convergence verdicts
/// must agree.
SdwnReport sdwn_convergence(const std::function<Distribution(int)>& family,
                            const Distribution& limit,
                            const YoungFunction& young, int n_max, double tol,
                            int metric_depth = 10,
                            std::vector<int> ladder = {});

}  // namespace wsetlab

#endif
