#ifndef WSETLAB_METRICS_HPP
#define WSETLAB_METRICS_HPP

#include <cstddef>

#include "wsetlab/distribution.hpp"
#include "wsetlab/gauge.hpp"

namespace wsetlab {

enum class MetricMethod { ClosedForm, GridScan, StrassenFlow };

struct MetricReport {
  double value = 0.0;
  MetricMethod method = MetricMethod::GridScan;
  double error_bound = 0.0;
};

/// Levy distance between two laws on the line:
///   inf{eps > 0 : F(x-eps)-eps <= G(x) <= F(x+eps)+eps for all x},
/// by bisection on eps with a violation search over an adaptive grid plus
/// all atoms. Lower bound for the Prohorov distance on R; capped at 1.
MetricReport levy_distance(const Distribution& mu, const Distribution& nu);

/// Exact Prohorov distance between finite-support laws. Strassen's
/// condition at radius eps is a bipartite transportation feasibility
/// problem; on sorted atoms the admissible pairs form monotone windows,
/// so the max-flow value comes from an earliest-deadline sweep. The
/// optimum is snapped to its exact critical value max(t, 1 - flow(t)).
MetricReport prohorov_distance_finite(const Distribution& mu,
                                      const Distribution& nu,
                                      std::size_t max_atoms = 5000);

/// Composite metric for the gauge-weighted topology:
///   d(mu, nu) = levy + sum_{k<=K} 2^{-k} (|int psi_k dmu - int psi_k dnu| ^ 1)
/// The dropped tail contributes at most 2^{-K}, folded into error_bound.
MetricReport psi_metric(const Distribution& mu, const Distribution& nu,
                        const GaugeSequence& seq, int depth);

/// Total variation distance on the union of finite supports (atom-wise
/// half-L1); both laws must be atomic.
double total_variation_finite(const Distribution& mu, const Distribution& nu);

}  // namespace wsetlab

#endif
