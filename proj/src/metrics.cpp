#include "wsetlab/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <vector>

#include "wsetlab/errors.hpp"

namespace wsetlab {

namespace {

struct AtomList {
  std::vector<double> x;  // sorted
  std::vector<double> w;  // positive, sums to 1
};

AtomList atoms_of(const Distribution& d) {
  AtomList out;
  if (const auto* di = std::get_if<Distribution::Dirac>(&d.form())) {
    out.x = {di->c};
    out.w = {1.0};
    return out;
  }
  if (const auto* e = std::get_if<Distribution::Empirical>(&d.form())) {
    out.x = e->atoms;
    out.w.reserve(e->counts.size());
    for (double c : e->counts) out.w.push_back(c / e->den);
    return out;
  }
  fail(ErrorCode::DomainError, "finite-support metric needs atomic laws");
}

// ---------------------------------------------------------------------------
// Levy metric

constexpr double levy_tol = 1e-9;

struct LevyScan {
  std::vector<double> base;  // atoms + quantile grids of both laws, sorted
};

LevyScan levy_candidates(const Distribution& mu, const Distribution& nu) {
  LevyScan s;
  auto push_all = [&s](const std::vector<double>& xs) {
    s.base.insert(s.base.end(), xs.begin(), xs.end());
  };
  push_all(mu.atom_positions());
  push_all(nu.atom_positions());
  push_all(mu.quantile_grid(1024));
  push_all(nu.quantile_grid(1024));
  std::sort(s.base.begin(), s.base.end());
  s.base.erase(std::unique(s.base.begin(), s.base.end()), s.base.end());
  return s;
}

bool levy_feasible(const Distribution& mu, const Distribution& nu,
                   const LevyScan& scan, double eps) {
  const double slack = 1e-14;
  auto check_at = [&](double x) {
    // F_mu(x-eps) - eps <= F_nu(x) and F_nu(x) <= F_mu(x+eps) + eps,
    // together with their left-limit versions.
    if (mu.cdf(x - eps) - eps > nu.cdf(x) + slack) return false;
    if (mu.cdf_left(x - eps) - eps > nu.cdf_left(x) + slack) return false;
    if (nu.cdf(x) > mu.cdf(x + eps) + eps + slack) return false;
    if (nu.cdf_left(x) > mu.cdf_left(x + eps) + eps + slack) return false;
    return true;
  };
  for (double x : scan.base) {
    if (!check_at(x) || !check_at(x - eps) || !check_at(x + eps)) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Prohorov metric on finite supports

// Max mass transportable along pairs |x_i - y_j| <= t. Admissible right
// indices of each left atom form a window that moves monotonically with
// i, so the earliest-deadline greedy attains the max flow.
double interval_max_flow(const AtomList& mu, const AtomList& nu, double t) {
  const std::size_t n = mu.x.size(), m = nu.x.size();
  std::vector<std::size_t> lo(n), hi(n);  // window [lo, hi), empty if lo>=hi
  {
    std::size_t j = 0;
    for (std::size_t i = 0; i < n; ++i) {
      while (j < m && nu.x[j] < mu.x[i] - t) ++j;
      lo[i] = j;
    }
    std::size_t jj = m;
    for (std::size_t ii = n; ii-- > 0;) {
      while (jj > 0 && nu.x[jj - 1] > mu.x[ii] + t) --jj;
      hi[ii] = jj;
    }
  }
  using Entry = std::pair<std::size_t, double>;  // (window end, remaining)
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> active;
  double shipped = 0.0;
  std::size_t next_i = 0;
  for (std::size_t j = 0; j < m; ++j) {
    while (next_i < n && lo[next_i] <= j) {
      if (hi[next_i] > j) active.emplace(hi[next_i], mu.w[next_i]);
      ++next_i;
    }
    double cap = nu.w[j];
    while (cap > 0.0 && !active.empty()) {
      auto [deadline, remaining] = active.top();
      active.pop();
      if (deadline <= j) continue;  // window closed before j
      const double move = std::min(cap, remaining);
      shipped += move;
      cap -= move;
      remaining -= move;
      if (remaining > 0.0) active.emplace(deadline, remaining);
    }
  }
  return shipped;
}

// Largest pairwise distance not exceeding q (0 when none).
double snap_distance(const AtomList& mu, const AtomList& nu, double q) {
  double best = 0.0;
  std::size_t jlo = 0, jhi = 0;
  for (std::size_t i = 0; i < mu.x.size(); ++i) {
    while (jlo < nu.x.size() && nu.x[jlo] < mu.x[i] - q) ++jlo;
    while (jhi < nu.x.size() && nu.x[jhi] <= mu.x[i] + q) ++jhi;
    if (jlo < jhi) {
      best = std::max(best, std::abs(mu.x[i] - nu.x[jlo]));
      best = std::max(best, std::abs(mu.x[i] - nu.x[jhi - 1]));
    }
  }
  return best;
}

}  // namespace

MetricReport levy_distance(const Distribution& mu, const Distribution& nu) {
  const LevyScan scan = levy_candidates(mu, nu);
  if (levy_feasible(mu, nu, scan, 0.0))
    return MetricReport{0.0, MetricMethod::GridScan, levy_tol};
  double lo = 0.0, hi = 1.0;
  for (int i = 0; i < 60 && hi - lo > levy_tol * 0.5; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (levy_feasible(mu, nu, scan, mid))
      hi = mid;
    else
      lo = mid;
  }
  return MetricReport{hi, MetricMethod::GridScan, levy_tol};
}

MetricReport prohorov_distance_finite(const Distribution& mu,
                                      const Distribution& nu,
                                      std::size_t max_atoms) {
  const AtomList a = atoms_of(mu);
  const AtomList b = atoms_of(nu);
  if (a.x.size() > max_atoms || b.x.size() > max_atoms)
    fail(ErrorCode::TooLarge, "support exceeds configured atom limit (" +
                                  std::to_string(max_atoms) + ")");
  // Deficits are measured against the summed total mass rather than the
  // literal 1 so that identical atom lists cancel exactly.
  double total = 0.0;
  for (double w : a.w) total += w;
  auto feasible = [&](double eps) {
    return interval_max_flow(a, b, eps) >= total - eps - 1e-15;
  };
  double value;
  if (feasible(0.0)) {
    value = std::max(0.0, total - interval_max_flow(a, b, 0.0));
  } else {
    double lo = 0.0, hi = 1.0;
    for (int i = 0; i < 60 && hi - lo > 1e-13; ++i) {
      const double mid = 0.5 * (lo + hi);
      if (feasible(mid))
        hi = mid;
      else
        lo = mid;
    }
    // Snap to the exact critical value inside the located interval: the
    // optimum is max(t, deficit(t)) for the last edge activation t <= hi.
    const double t = snap_distance(a, b, hi * (1.0 + 1e-15) + 1e-300);
    const double flow = interval_max_flow(a, b, t);
    value = std::max(t, total - flow);
    if (value > 1.0) value = 1.0;
  }
  return MetricReport{value, MetricMethod::StrassenFlow, 0.0};
}

MetricReport psi_metric(const Distribution& mu, const Distribution& nu,
                        const GaugeSequence& seq, int depth) {
  if (depth < 1) fail(ErrorCode::DomainError, "psi_metric needs depth >= 1");
  const MetricReport levy = levy_distance(mu, nu);
  double value = levy.value;
  double err = levy.error_bound + std::pow(2.0, -depth);
  for (int k = 1; k <= depth; ++k) {
    const GaugeFunction g = seq.at(k);
    const GaugeIntegral im = integrate_gauge(mu, g);
    if (im.diverges)
      fail(ErrorCode::OutsideDomain,
           "gauge integral diverges for the first argument at k=" +
               std::to_string(k));
    const GaugeIntegral in = integrate_gauge(nu, g);
    if (in.diverges)
      fail(ErrorCode::OutsideDomain,
           "gauge integral diverges for the second argument at k=" +
               std::to_string(k));
    const double gap = std::min(std::abs(im.value - in.value), 1.0);
    value += std::pow(2.0, -k) * gap;
    err += std::pow(2.0, -k) * (im.abs_error + in.abs_error);
  }
  return MetricReport{value, MetricMethod::GridScan, err};
}

double total_variation_finite(const Distribution& mu, const Distribution& nu) {
  const AtomList a = atoms_of(mu);
  const AtomList b = atoms_of(nu);
  double tv = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.x.size() || j < b.x.size()) {
    if (j >= b.x.size() || (i < a.x.size() && a.x[i] < b.x[j])) {
      tv += a.w[i++];
    } else if (i >= a.x.size() || b.x[j] < a.x[i]) {
      tv += b.w[j++];
    } else {
      tv += std::abs(a.w[i] - b.w[j]);
      ++i;
      ++j;
    }
  }
  return 0.5 * tv;
}

}  // namespace wsetlab
