#ifndef WSETLAB_FUNCTIONALS_HPP
#define WSETLAB_FUNCTIONALS_HPP

#include <functional>
#include <span>
#include <string>
#include <variant>

#include "wsetlab/distribution.hpp"
#include "wsetlab/gauge.hpp"
#include "wsetlab/risk.hpp"

namespace wsetlab {

double eval_mean(const Distribution& mu);
double eval_lower_quantile(const Distribution& mu, double alpha);

/// Mean of a positive-support law; the unique maximizer of the
/// exponential-model log-likelihood. OutsideDomain for mass on (-inf,0]
/// or a divergent mean.
double mle_exponential(const Distribution& mu);

/// Unique root of the strictly decreasing derivative
///   a -> 1/a - E[X] + E[X e^{-aX}]
/// found by bracket expansion from a=1 and bisection to 1e-10.
/// OutsideDomain for the point mass at zero or when no bracket exists in
/// [1e-6, 1e6].
double mle_gumbel(const Distribution& mu);

/// Scale-parameter maximum likelihood for one of the shipped models
/// behind the same bracket-then-bisect engine.
double mle_model(LogDensityModel model, const Distribution& mu);

/// Generic 1-D concave maximum likelihood: the caller supplies
/// d/dtheta log f_theta(x) and is responsible for concavity in theta
/// (checked stochastically in the tests, not here).
double mle_concave_1d(
    const std::function<double(double, double)>& dtheta_log_density,
    const Distribution& mu, double theta_lo = 1e-6, double theta_hi = 1e6);

/// theta -> integral of log f_theta dmu; concave in theta for the
/// shipped models.
class LogLikelihoodCurve {
 public:
  LogLikelihoodCurve(LogDensityModel model, Distribution mu)
      : model_(model), mu_(std::move(mu)) {}
  double operator()(double theta) const;
  double derivative(double theta) const;

 private:
  LogDensityModel model_;
  Distribution mu_;
};

/// Statistical functional T with a computable domain predicate; plug-in
/// estimation applies T to the empirical measure of a sample.
class StatisticalFunctional {
 public:
  struct Mean {};
  struct LowerQuantile {
    double alpha;
  };
  struct MleExponential {};
  struct MleGumbel {};
  struct Risk {
    RiskFunctionalSpec spec;
  };
  using Form =
      std::variant<Mean, LowerQuantile, MleExponential, MleGumbel, Risk>;

  static StatisticalFunctional mean();
  static StatisticalFunctional lower_quantile(double alpha);
  static StatisticalFunctional mle_exponential();
  static StatisticalFunctional mle_gumbel();
  static StatisticalFunctional risk(RiskFunctionalSpec spec);

  const Form& form() const { return form_; }
  bool in_domain(const Distribution& mu) const;
  double evaluate(const Distribution& mu) const;
  std::string describe() const;

 private:
  explicit StatisticalFunctional(Form f) : form_(std::move(f)) {}
  Form form_;
};

double plug_in(const StatisticalFunctional& T, std::span<const double> sample);

}  // namespace wsetlab

#endif
