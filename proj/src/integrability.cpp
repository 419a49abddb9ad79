#include "wsetlab/integrability.hpp"

#include <cmath>

#include "wsetlab/errors.hpp"
#include "wsetlab/metrics.hpp"

namespace wsetlab {

const char* const kFiniteSurrogateNote =
    "finite-family / explicit-sequence evidence only: a fail is conclusive, "
    "a pass does not certify the neighborhood-version property";

namespace {

constexpr int grid_points = 121;

double grid_threshold(int j) { return std::pow(2.0, j / 4.0); }

}  // namespace

UniformIntegrabilityReport uniform_integrating_check(
    const std::vector<Distribution>& family, const GaugeSequence& seq,
    int depth, double epsilon) {
  if (family.empty()) fail(ErrorCode::DomainError, "empty family");
  if (depth < 1) fail(ErrorCode::DomainError, "depth >= 1 required");
  UniformIntegrabilityReport report;
  report.family_size = family.size();
  report.note = kFiniteSurrogateNote;
  report.pass = true;
  for (int k = 1; k <= depth; ++k) {
    const GaugeFunction g = seq.at(k);
    for (std::size_t i = 0; i < family.size(); ++i) {
      if (integrate_gauge(family[i], g).diverges)
        fail(ErrorCode::OutsideDomain,
             "family member " + std::to_string(i) +
                 " has a divergent gauge integral at k=" + std::to_string(k));
    }
    auto sup_tail = [&](double a) {
      double sup = 0.0;
      int witness = -1;
      for (std::size_t i = 0; i < family.size(); ++i) {
        const double t = tail_gauge_integral(family[i], g, a).value;
        if (t > sup) {
          sup = t;
          witness = static_cast<int>(i);
        }
      }
      return std::pair<double, int>{sup, witness};
    };
    // The tail is nonincreasing in a, so the least passing grid point is
    // found by bisection over the grid index.
    UniformIntegrabilityEntry entry;
    entry.k = k;
    entry.epsilon = epsilon;
    const auto [sup_last, wit_last] = sup_tail(grid_threshold(grid_points - 1));
    if (sup_last > epsilon) {
      entry.found = false;
      entry.threshold = grid_threshold(grid_points - 1);
      entry.achieved_sup = sup_last;
      entry.witness = wit_last;
      report.pass = false;
      report.per_k.push_back(entry);
      continue;
    }
    int lo = 0, hi = grid_points - 1;
    auto [sup0, w0] = sup_tail(grid_threshold(0));
    if (sup0 <= epsilon) {
      hi = 0;
    } else {
      while (hi - lo > 1) {
        const int mid = (lo + hi) / 2;
        if (sup_tail(grid_threshold(mid)).first <= epsilon)
          hi = mid;
        else
          lo = mid;
      }
    }
    entry.found = true;
    entry.threshold = grid_threshold(hi);
    entry.achieved_sup = sup_tail(entry.threshold).first;
    report.per_k.push_back(entry);
  }
  return report;
}

SequenceConvergenceReport sequence_condition_e(
    const std::function<Distribution(int)>& family, const Distribution& limit,
    const GaugeSequence& gauges, int depth, int n_max, double tol) {
  if (n_max < 1) fail(ErrorCode::DomainError, "n_max >= 1 required");
  if (depth < 1) fail(ErrorCode::DomainError, "depth >= 1 required");
  SequenceConvergenceReport report;
  report.tol = tol;
  report.note = kFiniteSurrogateNote;
  report.gauge_gaps.assign(depth, {});

  std::vector<double> limit_integrals(depth);
  for (int k = 1; k <= depth; ++k) {
    const GaugeIntegral gi = integrate_gauge(limit, gauges.at(k));
    if (gi.diverges)
      fail(ErrorCode::OutsideDomain,
           "limit law has a divergent gauge integral at k=" +
               std::to_string(k));
    limit_integrals[k - 1] = gi.value;
  }
  for (int n = 1; n <= n_max; ++n) {
    const Distribution mu = family(n);
    report.n_values.push_back(n);
    report.levy_gaps.push_back(levy_distance(mu, limit).value);
    for (int k = 1; k <= depth; ++k) {
      const GaugeIntegral gi = integrate_gauge(mu, gauges.at(k));
      if (gi.diverges)
        fail(ErrorCode::OutsideDomain,
             "mu_" + std::to_string(n) +
                 " has a divergent gauge integral at k=" + std::to_string(k));
      report.gauge_gaps[k - 1].push_back(
          std::abs(gi.value - limit_integrals[k - 1]));
    }
  }
  report.failing_k = -1;
  report.pass = true;
  if (report.levy_gaps.back() > tol) {
    report.pass = false;
    report.failing_k = 0;
  }
  for (int k = 1; k <= depth && report.pass; ++k) {
    if (report.gauge_gaps[k - 1].back() > tol) {
      report.pass = false;
      report.failing_k = k;
    }
  }
  return report;
}

ParametricWsetReport parametric_wset_check(
    const std::vector<Distribution>& grid, const GaugeSequence& gauges,
    int depth, const std::vector<ParametricProbe>& probes, double tol,
    double injectivity_floor) {
  ParametricWsetReport report;
  report.note = kFiniteSurrogateNote;
  report.injectivity_floor = injectivity_floor;
  report.min_pairwise_levy = 1.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    for (std::size_t j = i + 1; j < grid.size(); ++j) {
      report.min_pairwise_levy = std::min(
          report.min_pairwise_levy, levy_distance(grid[i], grid[j]).value);
    }
  }
  report.injectivity_ok =
      grid.size() < 2 || report.min_pairwise_levy >= injectivity_floor;
  report.pass = report.injectivity_ok;
  for (const ParametricProbe& probe : probes) {
    report.probe_reports.push_back(sequence_condition_e(
        probe.family, probe.limit, gauges, depth, probe.n_max, tol));
    report.pass = report.pass && report.probe_reports.back().pass;
  }
  return report;
}

}  // namespace wsetlab
