#ifndef WSETLAB_FRECHET_HPP
#define WSETLAB_FRECHET_HPP

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "wsetlab/distribution.hpp"
#include "wsetlab/gauge.hpp"
#include "wsetlab/integrability.hpp"

namespace wsetlab {

/// Couplings of fixed one-dimensional marginals. The class with all
/// possible dependence structures is infinite; these are the sampled
/// faces, and the tail bound below is uniform over the whole class.
struct FrechetSpec {
  struct Independent {};
  struct Comonotone {};
  struct Countermonotone {};  // d = 2 only
  struct GaussianCopula {
    std::vector<double> correlation;  // d*d row-major, PSD within 1e-10
  };
  using Coupling =
      std::variant<Independent, Comonotone, Countermonotone, GaussianCopula>;

  std::vector<Distribution> marginals;
  Coupling coupling = Independent{};

  std::size_t dimension() const { return marginals.size(); }
  std::string coupling_name() const;
};

/// Real-valued aggregation of a coordinate vector, with the affine
/// growth certificate |A(x)| <= b + c sum |x_i|.
class AggregationMap {
 public:
  struct Identity {};  // r = d; sample-only, no scalar image law
  struct Sum {};
  struct Max {};
  struct StopLossSum {
    std::vector<double> thresholds;  // all > 0
  };
  struct AggregateStopLoss {
    double threshold;  // > 0
  };
  using Form =
      std::variant<Identity, Sum, Max, StopLossSum, AggregateStopLoss>;

  static AggregationMap identity();
  static AggregationMap sum();
  static AggregationMap max();
  static AggregationMap stop_loss_sum(std::vector<double> thresholds);
  static AggregationMap aggregate_stop_loss(double threshold);

  const Form& form() const { return form_; }
  bool scalar_valued() const;
  double apply(std::span<const double> x) const;
  /// (b, c) with |A(x)| <= b + c sum |x_i|.
  std::pair<double, double> lipschitz_bound() const;
  std::string describe() const;

 private:
  explicit AggregationMap(Form f) : form_(std::move(f)) {}
  Form form_;
};

/// One coordinate vector drawn from the coupling; draw index i is a pure
/// function of (seed, stream, i).
std::vector<double> sample_vector(const FrechetSpec& spec, std::uint64_t seed,
                                  std::uint64_t stream, std::uint64_t index);

/// n draws of A(Y_1..Y_d) as a finite-support law.
Distribution sample_aggregate(const FrechetSpec& spec, const AggregationMap& A,
                              std::uint64_t seed, std::uint64_t stream,
                              std::size_t n);

/// Draws from the coupling that follows `observed` with probability t and
/// `base` otherwise (a legitimate member of the same class); used for
/// dependence-uncertainty sweeps.
std::vector<double> sample_aggregate_values_mixed(
    const FrechetSpec& base, const FrechetSpec& observed, double t,
    const AggregationMap& A, std::uint64_t seed, std::uint64_t stream,
    std::size_t n);

/// Coupling-uniform tail bound for the image law: for convex even gauges,
///   int psi_k 1{psi_k >= a} d(mu o A^{-1})
///     <= sum_{i=0..d} tail of psi_k((d+1)c |.|) under marginal i,
/// with the i = 0 term the constant psi_k((d+1)b). Reports, per k, the
/// least grid threshold with bound <= epsilon.
UniformIntegrabilityReport aggregation_ui_bound(const FrechetSpec& spec,
                                                const AggregationMap& A,
                                                const GaugeSequence& gauges,
                                                int depth, double epsilon);

/// The bound itself at a single (k, a); exposed for the tests that compare
/// sampled tails against it.
double aggregation_tail_bound(const FrechetSpec& spec, const AggregationMap& A,
                              const GaugeFunction& psi_k, double a);

}  // namespace wsetlab

#endif
