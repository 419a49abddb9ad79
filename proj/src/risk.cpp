#include "wsetlab/risk.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "wsetlab/errors.hpp"
#include "wsetlab/metrics.hpp"
#include "wsetlab/numeric.hpp"

namespace wsetlab {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

struct AtomView {
  std::vector<double> x;
  std::vector<double> count;
  double den = 1.0;
};

bool atom_view(const Distribution& d, AtomView& out) {
  if (const auto* di = std::get_if<Distribution::Dirac>(&d.form())) {
    out.x = {di->c};
    out.count = {1.0};
    out.den = 1.0;
    return true;
  }
  if (const auto* e = std::get_if<Distribution::Empirical>(&d.form())) {
    out.x = e->atoms;
    out.count = e->counts;
    out.den = e->den;
    return true;
  }
  return false;
}

}  // namespace

RiskFunctionalSpec RiskFunctionalSpec::avar(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0))
    fail(ErrorCode::DomainError, "avar needs alpha in (0,1)");
  return RiskFunctionalSpec(AVaR{alpha});
}

RiskFunctionalSpec RiskFunctionalSpec::distortion_avar(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0))
    fail(ErrorCode::DomainError, "distortion needs alpha in (0,1)");
  Distortion d;
  d.g = [alpha](double t) { return std::min(t / alpha, 1.0); };
  d.label = "tail-mean distortion, alpha=" + std::to_string(alpha);
  return RiskFunctionalSpec(std::move(d));
}

RiskFunctionalSpec RiskFunctionalSpec::shortfall(YoungFunction young,
                                                 double x0) {
  if (!(x0 > 0.0)) fail(ErrorCode::DomainError, "shortfall needs x0 > 0");
  return RiskFunctionalSpec(Shortfall{std::move(young), x0});
}

RiskFunctionalSpec RiskFunctionalSpec::one_sided_moment(double p) {
  if (!(p >= 1.0))
    fail(ErrorCode::DomainError, "one_sided_moment needs p >= 1");
  return RiskFunctionalSpec(OneSidedMoment{p});
}

YoungFunction RiskFunctionalSpec::domain_young() const {
  struct V {
    YoungFunction operator()(const Distortion&) const {
      return YoungFunction::linear();
    }
    YoungFunction operator()(const AVaR&) const {
      return YoungFunction::linear();
    }
    YoungFunction operator()(const Shortfall& s) const { return s.young; }
    YoungFunction operator()(const OneSidedMoment& m) const {
      return YoungFunction::power_over_p(m.p);
    }
  };
  return std::visit(V{}, form_);
}

std::string RiskFunctionalSpec::describe() const {
  struct V {
    std::string operator()(const Distortion& d) const { return d.label; }
    std::string operator()(const AVaR& a) const {
      return "avar(" + std::to_string(a.alpha) + ")";
    }
    std::string operator()(const Shortfall& s) const {
      return "shortfall(" + s.young.label() + ", x0=" + std::to_string(s.x0) +
             ")";
    }
    std::string operator()(const OneSidedMoment& m) const {
      return "one_sided_moment(" + std::to_string(m.p) + ")";
    }
  };
  return std::visit(V{}, form_);
}

OrliczMembershipReport orlicz_heart_member(const Distribution& mu,
                                           const YoungFunction& young,
                                           const std::vector<double>& probes) {
  OrliczMembershipReport report;
  report.member = true;
  for (double c : probes) {
    OrliczProbe p;
    p.c = c;
    try {
      const GaugeIntegral gi =
          integrate_gauge(mu, GaugeFunction::scaled(young, c));
      p.finite = !gi.diverges;
      p.value = gi.value;
    } catch (const Error&) {
      p.finite = false;  // quadrature failure counts as failed evidence
    }
    report.member = report.member && p.finite;
    report.probes.push_back(p);
  }
  return report;
}

namespace {

// E[young(|X|/lambda)]; +inf when the integral diverges.
double young_mean(const Distribution& mu, const YoungFunction& young,
                  double lambda) {
  const GaugeIntegral gi =
      integrate_gauge(mu, GaugeFunction::scaled(young, 1.0 / lambda));
  return gi.diverges ? inf : gi.value;
}

}  // namespace

double luxemburg_norm(const Distribution& mu, const YoungFunction& young) {
  // X == 0 a.s. has norm zero; detect cheaply via |X| mass.
  AtomView av;
  if (atom_view(mu, av) && av.x.size() == 1 && av.x[0] == 0.0) return 0.0;
  double hi = 1.0;
  int guard = 0;
  while (young_mean(mu, young, hi) > 1.0) {
    hi *= 2.0;
    if (++guard > 2000 || hi > 1e250)
      fail(ErrorCode::OutsideDomain,
           "no finite lambda brackets the Luxemburg norm for " +
               mu.describe());
  }
  double lo = hi * 0.5;
  while (lo > 1e-300 && young_mean(mu, young, lo) <= 1.0) {
    hi = lo;
    lo *= 0.5;
  }
  if (lo <= 1e-300) return 0.0;
  for (int i = 0; i < 200 && hi - lo > 1e-9 * 0.5; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (young_mean(mu, young, mid) <= 1.0)
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

namespace {

// ---- AVaR ----------------------------------------------------------------

double avar_atomic(double alpha, const AtomView& a) {
  const double target = alpha * a.den;
  double cum = 0.0;
  double acc = 0.0;  // sum of x * count over the lower alpha-fraction
  for (std::size_t i = 0; i < a.x.size() && cum < target; ++i) {
    const double take = std::min(a.count[i], target - cum);
    acc += a.x[i] * take;
    cum += take;
  }
  return -(acc / a.den) / alpha;
}

double avar_quantile_quadrature(double alpha, const Distribution& mu) {
  std::vector<double> bp;
  for (int j = 1; j < 45; ++j) bp.push_back(alpha * std::pow(2.0, -j));
  const num::QuadResult q = num::integrate(
      [&mu](double u) { return mu.quantile(u); }, 0.0, alpha, 1e-10, 1e-8,
      4000, bp);
  if (!q.converged)
    fail(ErrorCode::QuadratureFailure, "avar quantile integral");
  return -q.value / alpha;
}

// ---- Distortion ----------------------------------------------------------

double distortion_atomic(const std::function<double(double)>& g,
                         const AtomView& a) {
  // F is constant between atoms; integrate the two cdf expressions
  // segment-exactly, splitting at zero.
  std::vector<double> edges = a.x;
  if (edges.front() > 0.0) edges.insert(edges.begin(), 0.0);
  if (edges.back() < 0.0) edges.push_back(0.0);
  double value = 0.0;
  double cum = 0.0;
  std::size_t ai = 0;
  for (std::size_t s = 0; s + 1 < edges.size(); ++s) {
    while (ai < a.x.size() && a.x[ai] <= edges[s]) cum += a.count[ai++];
    const double F = cum / a.den;
    double lo = edges[s], hi = edges[s + 1];
    if (lo < 0.0) {
      const double top = std::min(hi, 0.0);
      value += g(F) * (top - lo);
      lo = top;
    }
    if (hi > 0.0 && lo < hi) value -= (1.0 - g(F)) * (hi - lo);
  }
  return value;
}

double distortion_analytic(const std::function<double(double)>& g,
                           const Distribution& mu) {
  const num::QuadResult left = num::integrate_line(
      [&](double x) { return g(mu.cdf(x)); }, -inf, 0.0, 1e-10, 1e-8, 4000);
  if (left.diverged)
    fail(ErrorCode::OutsideDomain, "distortion lower cdf integral diverges");
  const num::QuadResult right = num::integrate_line(
      [&](double x) { return 1.0 - g(mu.cdf(x)); }, 0.0, inf, 1e-10, 1e-8,
      4000);
  if (right.diverged)
    fail(ErrorCode::OutsideDomain, "distortion upper cdf integral diverges");
  if (!left.converged || !right.converged)
    fail(ErrorCode::QuadratureFailure, "distortion cdf integrals");
  return left.value - right.value;
}

// ---- Shortfall -----------------------------------------------------------

double shortfall_load(const Distribution& mu, const YoungFunction& young,
                      double m) {
  AtomView a;
  if (atom_view(mu, a)) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.x.size(); ++i) {
      const double arg = -a.x[i] - m;
      if (arg > 0.0) s += a.count[i] * young(arg);
    }
    return s / a.den;
  }
  const double cut = -m;  // integrand vanishes for x >= -m
  const num::QuadResult q = num::integrate_line(
      [&](double x) {
        const double arg = -x - m;
        if (arg <= 0.0) return 0.0;
        const double dens = mu.density(x);
        return dens == 0.0 ? 0.0 : dens * young(arg);
      },
      -inf, cut, 1e-11, 1e-8, 4000);
  if (q.diverged)
    fail(ErrorCode::OutsideDomain, "shortfall load integral diverges");
  if (!q.converged) fail(ErrorCode::QuadratureFailure, "shortfall load");
  return q.value;
}

double shortfall_atomic_exact(const AtomView& a, const YoungFunction& young,
                              double x0) {
  // h(m) = sum w_i young((-x_i - m)^+) is continuous, nonincreasing,
  // piecewise smooth with kinks at m = -x_i. Walk segments from the
  // right; solve inside the crossing segment.
  std::vector<double> kinks;
  for (double x : a.x) kinks.push_back(-x);
  std::sort(kinks.begin(), kinks.end());
  auto h = [&](double m) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.x.size(); ++i) {
      const double arg = -a.x[i] - m;
      if (arg > 0.0) s += a.count[i] * young(arg);
    }
    return s / a.den;
  };
  if (h(kinks.back()) > x0)
    fail(ErrorCode::BracketFailure, "shortfall load above x0 at every kink");
  // Find the highest kink with h > x0; the crossing is in that segment.
  int seg = -1;
  for (int i = static_cast<int>(kinks.size()) - 1; i >= 0; --i) {
    if (h(kinks[i]) > x0) {
      seg = i;
      break;
    }
  }
  if (seg < 0) {
    // h <= x0 at every kink: crossing is below the lowest kink or the
    // value never exceeds x0 (then the infimum runs to -inf only if
    // h(-inf) <= x0, impossible for nondegenerate young). Extend left.
    double lo = kinks.front() - 1.0;
    int guard = 0;
    while (h(lo) <= x0) {
      lo -= std::max(1.0, std::abs(lo));
      if (++guard > 300)
        fail(ErrorCode::BracketFailure, "shortfall lower bracket");
    }
    return num::bisect_root([&](double m) { return h(m) - x0; }, lo,
                            kinks.front(), 1e-12);
  }
  const double lo = kinks[seg];
  const double hi = seg + 1 < static_cast<int>(kinks.size())
                        ? kinks[seg + 1]
                        : kinks.back() + 1.0;
  if (young.form() == YoungFunction::Form::Linear) {
    // Segment is affine: h(m) = A - B m with B the active mass.
    double A = 0.0, B = 0.0;
    for (std::size_t i = 0; i < a.x.size(); ++i) {
      if (-a.x[i] > lo) {
        A += a.count[i] * (-a.x[i]);
        B += a.count[i];
      }
    }
    A /= a.den;
    B /= a.den;
    return (A - x0) / B;
  }
  return num::bisect_root([&](double m) { return h(m) - x0; }, lo, hi, 1e-12);
}

double shortfall_value(const Distribution& mu, const YoungFunction& young,
                       double x0) {
  AtomView a;
  if (atom_view(mu, a)) return shortfall_atomic_exact(a, young, x0);
  double lo = -mu.quantile(1.0 - 1e-9) - x0 - 1.0;
  double hi = -mu.quantile(1e-9);
  int guard = 0;
  while (shortfall_load(mu, young, lo) <= x0) {
    lo -= std::max(1.0, std::abs(lo));
    if (++guard > 300)
      fail(ErrorCode::BracketFailure, "shortfall lower bracket");
  }
  guard = 0;
  while (shortfall_load(mu, young, hi) > x0) {
    hi += std::max(1.0, std::abs(hi));
    if (++guard > 300)
      fail(ErrorCode::BracketFailure, "shortfall upper bracket");
  }
  return num::bisect_root(
      [&](double m) { return shortfall_load(mu, young, m) - x0; }, lo, hi,
      1e-10);
}

// ---- One-sided moment ------------------------------------------------------

double one_sided_moment_value(const Distribution& mu, double p) {
  AtomView a;
  if (atom_view(mu, a)) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.x.size(); ++i)
      if (a.x[i] < 0.0) s += a.count[i] * std::pow(-a.x[i], p);
    return s / a.den;
  }
  if (const auto* m = std::get_if<Distribution::Mixture>(&mu.form())) {
    double s = 0.0;
    for (std::size_t i = 0; i < m->weights.size(); ++i)
      s += m->weights[i] * one_sided_moment_value(*m->components[i], p);
    return s;
  }
  const num::QuadResult q = num::integrate_line(
      [&](double x) {
        if (x >= 0.0) return 0.0;
        const double dens = mu.density(x);
        return dens == 0.0 ? 0.0 : dens * std::pow(-x, p);
      },
      -inf, 0.0, 1e-10, 1e-8, 4000);
  if (q.diverged)
    fail(ErrorCode::OutsideDomain, "negative-part moment diverges");
  if (!q.converged)
    fail(ErrorCode::QuadratureFailure, "negative-part moment");
  return q.value;
}

void require_domain_evidence(const RiskFunctionalSpec& spec,
                             const Distribution& mu) {
  struct V {
    const Distribution& mu;
    void operator()(const RiskFunctionalSpec::AVaR&) const {
      if (!mu.has_finite_mean())
        fail(ErrorCode::OutsideDomain, "avar needs a finite mean");
    }
    void operator()(const RiskFunctionalSpec::Distortion&) const {
      if (!mu.has_finite_mean())
        fail(ErrorCode::OutsideDomain, "distortion needs a finite mean");
    }
    void operator()(const RiskFunctionalSpec::Shortfall&) const {
      // The load integral only sees the left tail; divergence surfaces
      // there as OutsideDomain.
    }
    void operator()(const RiskFunctionalSpec::OneSidedMoment&) const {}
  };
  std::visit(V{mu}, spec.form());
}

}  // namespace

double eval_risk(const RiskFunctionalSpec& spec, const Distribution& mu) {
  require_domain_evidence(spec, mu);
  struct V {
    const Distribution& mu;
    double operator()(const RiskFunctionalSpec::AVaR& a) const {
      AtomView av;
      if (atom_view(mu, av)) return avar_atomic(a.alpha, av);
      return avar_quantile_quadrature(a.alpha, mu);
    }
    double operator()(const RiskFunctionalSpec::Distortion& d) const {
      AtomView av;
      if (atom_view(mu, av)) return distortion_atomic(d.g, av);
      return distortion_analytic(d.g, mu);
    }
    double operator()(const RiskFunctionalSpec::Shortfall& s) const {
      return shortfall_value(mu, s.young, s.x0);
    }
    double operator()(const RiskFunctionalSpec::OneSidedMoment& m) const {
      return one_sided_moment_value(mu, m.p);
    }
  };
  return std::visit(V{mu}, spec.form());
}

namespace {

// Cumulative-probability breakpoints of an atomic law (interior only).
std::vector<double> cum_levels(const Distribution& d) {
  std::vector<double> out;
  AtomView a;
  if (atom_view(d, a)) {
    double cum = 0.0;
    for (std::size_t i = 0; i + 1 < a.x.size(); ++i) {
      cum += a.count[i];
      out.push_back(cum / a.den);
    }
  }
  return out;
}

double coupling_load(const Distribution& mu, const Distribution& nu,
                     const YoungFunction& young, double lambda) {
  AtomView am, an;
  if (atom_view(mu, am) && atom_view(nu, an)) {
    // Piecewise-constant quantiles: exact segment sum over merged levels.
    std::vector<double> levels = cum_levels(mu);
    const std::vector<double> ln = cum_levels(nu);
    levels.insert(levels.end(), ln.begin(), ln.end());
    levels.push_back(1.0);
    std::sort(levels.begin(), levels.end());
    levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
    double s = 0.0;
    double prev = 0.0;
    for (double lev : levels) {
      const double mid = 0.5 * (prev + lev);
      const double d = std::abs(mu.quantile(mid) - nu.quantile(mid));
      if (d > 0.0) s += (lev - prev) * young(d / lambda);
      prev = lev;
    }
    return s;
  }
  std::vector<double> bp = cum_levels(mu);
  {
    const std::vector<double> ln = cum_levels(nu);
    bp.insert(bp.end(), ln.begin(), ln.end());
  }
  for (int j = 1; j < 45; ++j) {
    bp.push_back(std::pow(2.0, -j));
    bp.push_back(1.0 - std::pow(2.0, -j));
  }
  const num::QuadResult q = num::integrate(
      [&](double u) {
        const double d = std::abs(mu.quantile(u) - nu.quantile(u));
        return d == 0.0 ? 0.0 : young(d / lambda);
      },
      0.0, 1.0, 1e-10, 1e-8, 4000, bp);
  if (q.diverged) return inf;
  if (!q.converged)
    fail(ErrorCode::QuadratureFailure, "quantile coupling load");
  return q.value;
}

}  // namespace

double quantile_coupling_norm(const Distribution& mu, const Distribution& nu,
                              const YoungFunction& young) {
  // Zero difference has norm zero; probe a few levels cheaply first.
  bool maybe_zero = true;
  for (double u : {0.1, 0.3, 0.5, 0.7, 0.9})
    maybe_zero = maybe_zero && mu.quantile(u) == nu.quantile(u);
  if (maybe_zero && coupling_load(mu, nu, young, 1.0) == 0.0) return 0.0;
  double hi = 1.0;
  int guard = 0;
  while (coupling_load(mu, nu, young, hi) > 1.0) {
    hi *= 2.0;
    if (++guard > 2000 || hi > 1e250)
      fail(ErrorCode::OutsideDomain,
           "no finite lambda brackets the coupling norm");
  }
  double lo = hi * 0.5;
  while (lo > 1e-300 && coupling_load(mu, nu, young, lo) <= 1.0) {
    hi = lo;
    lo *= 0.5;
  }
  if (lo <= 1e-300) return 0.0;
  for (int i = 0; i < 200 && hi - lo > 1e-9 * 0.5; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (coupling_load(mu, nu, young, mid) <= 1.0)
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

SdwnReport sdwn_convergence(const std::function<Distribution(int)>& family,
                            const Distribution& limit,
                            const YoungFunction& young, int n_max, double tol,
                            int metric_depth, std::vector<int> ladder) {
  if (n_max < 1) fail(ErrorCode::DomainError, "n_max >= 1 required");
  if (ladder.empty()) {
    if (n_max <= 128) {
      for (int n = 1; n <= n_max; ++n) ladder.push_back(n);
    } else {
      for (int n = 1; n <= n_max;) {
        ladder.push_back(n);
        n = std::max(n + 1, n + n / 3);
      }
      if (ladder.back() != n_max) ladder.push_back(n_max);
    }
  }
  const GaugeSequence gauges = GaugeSequence::young_scaled(young);
  SdwnReport report;
  report.tol = tol;
  for (int n : ladder) {
    const Distribution mu = family(n);
    SdwnRow row;
    row.n = n;
    row.luxemburg = quantile_coupling_norm(mu, limit, young);
    row.psi_metric = psi_metric(mu, limit, gauges, metric_depth).value;
    report.rows.push_back(row);
  }
  report.norm_converges = report.rows.back().luxemburg <= tol;
  report.metric_converges = report.rows.back().psi_metric <= tol;
  report.equivalent = report.norm_converges == report.metric_converges;
  return report;
}

}  // namespace wsetlab
