#ifndef WSETLAB_DISTRIBUTION_HPP
#define WSETLAB_DISTRIBUTION_HPP

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "wsetlab/gauge.hpp"

namespace wsetlab {

/// One-dimensional probability law: analytic families, finite-support
/// empirical measures, and finite mixtures. Immutable value type; cheap
/// to copy (mixture components are shared).
class Distribution {
 public:
  struct Normal {
    double m, sigma;
  };
  struct Exponential {
    double theta;  // mean
  };
  struct Gamma {
    double kappa, theta;
  };
  struct Pareto {
    double a, x_min;
  };
  struct Gumbel {
    double a;  // location 0, scale 1/a
  };
  struct Dirac {
    double c;
  };
  // Atom weights are kept as counts over a common denominator so that
  // sample-born uniform weights stay exact (sum x_i / n, not sum of 1/n).
  struct Empirical {
    std::vector<double> atoms;   // sorted, distinct
    std::vector<double> counts;  // positive
    double den;                  // sum of counts
  };
  struct Mixture {
    std::vector<double> weights;
    std::vector<std::shared_ptr<const Distribution>> components;
  };
  using Form = std::variant<Normal, Exponential, Gamma, Pareto, Gumbel, Dirac,
                            Empirical, Mixture>;

  static Distribution normal(double m, double sigma);
  static Distribution exponential(double theta);
  static Distribution gamma(double kappa, double theta);
  static Distribution pareto(double a, double x_min);
  static Distribution gumbel(double a);
  static Distribution dirac(double c);
  static Distribution empirical(std::vector<double> atoms,
                                std::vector<double> weights);
  static Distribution empirical_counts(std::vector<double> atoms,
                                       std::vector<double> counts, double den);
  static Distribution from_sample(std::span<const double> xs);
  /// Mixtures of purely atomic components collapse to a single Empirical.
  static Distribution mixture(
      std::vector<std::pair<double, Distribution>> components);

  const Form& form() const { return form_; }
  std::string describe() const;

  double cdf(double x) const;
  double cdf_left(double x) const;  // F(x-)
  /// Left quantile F^{<-}(u) = inf{x : F(x) >= u}, u in (0,1).
  double quantile(double u) const;

  bool has_finite_mean() const;
  double mean() const;  // OutsideDomain when the mean diverges

  /// Density of the analytic absolutely continuous kinds; zero off the
  /// support. DomainError for atomic kinds and mixtures with atoms.
  double density(double x) const;

  bool is_atomic() const;        // Dirac or Empirical
  bool has_atoms() const;        // any point mass anywhere in the tree
  std::vector<double> atom_positions() const;

  /// Monotone grid of quantiles at `levels` interior levels; used by the
  /// metric violation searches.
  std::vector<double> quantile_grid(std::size_t levels) const;

 private:
  explicit Distribution(Form f) : form_(std::move(f)) {}
  Form form_;
};

/// Reproducible i.i.d. sampling by inversion from the counter-based
/// uniform generator: draw i is a pure function of (seed, stream, i).
struct SampleStream {
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;
  Distribution distribution;

  double draw(std::uint64_t index) const;
  std::vector<double> sample(std::size_t n) const;
};

struct GaugeIntegral {
  double value = 0.0;
  double abs_error = 0.0;
  bool diverges = false;
};

/// Integral of the gauge against the law: closed form where tabulated,
/// adaptive quadrature otherwise. `diverges` is set by the analytic
/// moment rules (or the quadrature growth guard) rather than thrown.
GaugeIntegral integrate_gauge(const Distribution& d, const GaugeFunction& g);

/// Integral of psi over {psi >= a}.
GaugeIntegral tail_gauge_integral(const Distribution& d,
                                  const GaugeFunction& g, double a);

/// Kolmogorov distance between the empirical cdf of xs and d's cdf.
double kolmogorov_distance(const Distribution& d, std::vector<double> xs);

}  // namespace wsetlab

#endif
