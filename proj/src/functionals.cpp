#include "wsetlab/functionals.hpp"

#include <cmath>
#include <limits>

#include "wsetlab/errors.hpp"
#include "wsetlab/numeric.hpp"

namespace wsetlab {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

// Integral of f against mu: atom sum for finite-support laws, weighted
// recursion for mixtures, density quadrature otherwise. `diverged` is
// signalled through a thrown OutsideDomain.
double expect(const Distribution& mu, const std::function<double(double)>& f,
              const char* what) {
  if (const auto* d = std::get_if<Distribution::Dirac>(&mu.form()))
    return f(d->c);
  if (const auto* e = std::get_if<Distribution::Empirical>(&mu.form())) {
    double s = 0.0;
    for (std::size_t i = 0; i < e->atoms.size(); ++i)
      s += e->counts[i] * f(e->atoms[i]);
    return s / e->den;
  }
  if (const auto* m = std::get_if<Distribution::Mixture>(&mu.form())) {
    double s = 0.0;
    for (std::size_t i = 0; i < m->weights.size(); ++i)
      s += m->weights[i] * expect(*m->components[i], f, what);
    return s;
  }
  const num::QuadResult q = num::integrate_line(
      [&](double x) {
        const double dens = mu.density(x);
        return dens == 0.0 ? 0.0 : dens * f(x);
      },
      -inf, inf, 1e-10, 1e-8, 4000);
  if (q.diverged) fail(ErrorCode::OutsideDomain, std::string(what) + " diverges");
  if (!q.converged) fail(ErrorCode::QuadratureFailure, what);
  return q.value;
}

bool mass_at_or_below_zero(const Distribution& mu) { return mu.cdf(0.0) > 0.0; }

bool is_point_mass_at_zero(const Distribution& mu) {
  if (const auto* d = std::get_if<Distribution::Dirac>(&mu.form()))
    return d->c == 0.0;
  if (const auto* e = std::get_if<Distribution::Empirical>(&mu.form()))
    return e->atoms.size() == 1 && e->atoms[0] == 0.0;
  return false;
}

}  // namespace

double eval_mean(const Distribution& mu) {
  if (!mu.has_finite_mean())
    fail(ErrorCode::OutsideDomain, "first absolute moment diverges");
  return mu.mean();
}

double eval_lower_quantile(const Distribution& mu, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0))
    fail(ErrorCode::DomainError, "alpha must lie in (0,1)");
  return mu.quantile(alpha);
}

double mle_exponential(const Distribution& mu) {
  if (mass_at_or_below_zero(mu))
    fail(ErrorCode::OutsideDomain,
         "exponential model needs support in (0,inf)");
  const double m = eval_mean(mu);
  if (!(m > 0.0))
    fail(ErrorCode::OutsideDomain, "mean must be positive");
  return m;
}

double mle_concave_1d(
    const std::function<double(double, double)>& dtheta_log_density,
    const Distribution& mu, double theta_lo, double theta_hi) {
  auto score = [&](double theta) {
    return expect(
        mu, [&](double x) { return dtheta_log_density(theta, x); },
        "score integral");
  };
  double lo = 1.0, hi = 1.0;
  double s = score(1.0);
  if (s > 0.0) {
    lo = 1.0;
    hi = 2.0;
    while (score(hi) > 0.0) {
      lo = hi;
      hi *= 2.0;
      if (hi > theta_hi)
        fail(ErrorCode::OutsideDomain,
             "score stays positive up to the upper parameter bound");
    }
  } else if (s < 0.0) {
    hi = 1.0;
    lo = 0.5;
    while (score(lo) < 0.0) {
      hi = lo;
      lo *= 0.5;
      if (lo < theta_lo)
        fail(ErrorCode::OutsideDomain,
             "score stays negative down to the lower parameter bound");
    }
  } else {
    return 1.0;
  }
  return num::bisect_root(score, lo, hi, 1e-10);
}

double mle_gumbel(const Distribution& mu) {
  if (is_point_mass_at_zero(mu))
    fail(ErrorCode::OutsideDomain,
         "the point mass at zero is outside the model domain");
  return mle_concave_1d(
      [](double a, double x) {
        return dtheta_log_density(LogDensityModel::Gumbel, a, x);
      },
      mu);
}

double mle_model(LogDensityModel model, const Distribution& mu) {
  switch (model) {
    case LogDensityModel::Exponential:
      return mle_exponential(mu);
    case LogDensityModel::Gumbel:
      return mle_gumbel(mu);
  }
  fail(ErrorCode::DomainError, "unknown model");
}

double LogLikelihoodCurve::operator()(double theta) const {
  return expect(
      mu_, [&](double x) { return log_density(model_, theta, x); },
      "log-likelihood integral");
}

double LogLikelihoodCurve::derivative(double theta) const {
  return expect(
      mu_, [&](double x) { return dtheta_log_density(model_, theta, x); },
      "score integral");
}

// ---------------------------------------------------------------------------

StatisticalFunctional StatisticalFunctional::mean() {
  return StatisticalFunctional(Mean{});
}

StatisticalFunctional StatisticalFunctional::lower_quantile(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0))
    fail(ErrorCode::DomainError, "alpha must lie in (0,1)");
  return StatisticalFunctional(LowerQuantile{alpha});
}

StatisticalFunctional StatisticalFunctional::mle_exponential() {
  return StatisticalFunctional(MleExponential{});
}

StatisticalFunctional StatisticalFunctional::mle_gumbel() {
  return StatisticalFunctional(MleGumbel{});
}

StatisticalFunctional StatisticalFunctional::risk(RiskFunctionalSpec spec) {
  return StatisticalFunctional(Risk{std::move(spec)});
}

bool StatisticalFunctional::in_domain(const Distribution& mu) const {
  struct V {
    const Distribution& mu;
    bool operator()(const Mean&) const { return mu.has_finite_mean(); }
    bool operator()(const LowerQuantile&) const { return true; }
    bool operator()(const MleExponential&) const {
      return !mass_at_or_below_zero(mu) && mu.has_finite_mean();
    }
    bool operator()(const MleGumbel&) const {
      return !is_point_mass_at_zero(mu);
    }
    bool operator()(const Risk&) const { return mu.has_finite_mean(); }
  };
  return std::visit(V{mu}, form_);
}

double StatisticalFunctional::evaluate(const Distribution& mu) const {
  struct V {
    const Distribution& mu;
    double operator()(const Mean&) const { return eval_mean(mu); }
    double operator()(const LowerQuantile& q) const {
      return eval_lower_quantile(mu, q.alpha);
    }
    double operator()(const MleExponential&) const {
      return ::wsetlab::mle_exponential(mu);
    }
    double operator()(const MleGumbel&) const {
      return ::wsetlab::mle_gumbel(mu);
    }
    double operator()(const Risk& r) const { return eval_risk(r.spec, mu); }
  };
  return std::visit(V{mu}, form_);
}

std::string StatisticalFunctional::describe() const {
  struct V {
    std::string operator()(const Mean&) const { return "mean"; }
    std::string operator()(const LowerQuantile& q) const {
      return "lower_quantile(" + std::to_string(q.alpha) + ")";
    }
    std::string operator()(const MleExponential&) const {
      return "mle_exponential";
    }
    std::string operator()(const MleGumbel&) const { return "mle_gumbel"; }
    std::string operator()(const Risk& r) const { return r.spec.describe(); }
  };
  return std::visit(V{}, form_);
}

double plug_in(const StatisticalFunctional& T,
               std::span<const double> sample) {
  return T.evaluate(Distribution::from_sample(sample));
}

}  // namespace wsetlab
