#include "wsetlab/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "wsetlab/errors.hpp"
#include "wsetlab/numeric.hpp"
#include "wsetlab/rng.hpp"

namespace wsetlab {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

double sqrt_two_pi() { return std::sqrt(2.0 * std::atan2(0.0, -1.0)); }

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

// ---------------------------------------------------------------------------
// Construction

Distribution Distribution::normal(double m, double sigma) {
  if (!(sigma > 0.0)) fail(ErrorCode::DomainError, "normal needs sigma > 0");
  return Distribution(Normal{m, sigma});
}

Distribution Distribution::exponential(double theta) {
  if (!(theta > 0.0))
    fail(ErrorCode::DomainError, "exponential needs theta > 0");
  return Distribution(Exponential{theta});
}

Distribution Distribution::gamma(double kappa, double theta) {
  if (!(kappa > 0.0 && theta > 0.0))
    fail(ErrorCode::DomainError, "gamma needs kappa, theta > 0");
  return Distribution(Gamma{kappa, theta});
}

Distribution Distribution::pareto(double a, double x_min) {
  if (!(a > 0.0 && x_min > 0.0))
    fail(ErrorCode::DomainError, "pareto needs a, x_min > 0");
  return Distribution(Pareto{a, x_min});
}

Distribution Distribution::gumbel(double a) {
  if (!(a > 0.0)) fail(ErrorCode::DomainError, "gumbel needs a > 0");
  return Distribution(Gumbel{a});
}

Distribution Distribution::dirac(double c) { return Distribution(Dirac{c}); }

Distribution Distribution::empirical_counts(std::vector<double> atoms,
                                            std::vector<double> counts,
                                            double den) {
  if (atoms.size() != counts.size() || atoms.empty())
    fail(ErrorCode::DomainError, "empirical atom/count size mismatch");
  if (!(den > 0.0)) fail(ErrorCode::DomainError, "empirical needs den > 0");
  std::vector<std::size_t> order(atoms.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&atoms](std::size_t i, std::size_t j) {
              return atoms[i] < atoms[j];
            });
  Empirical e;
  e.den = den;
  for (std::size_t i : order) {
    if (!std::isfinite(atoms[i]))
      fail(ErrorCode::DomainError, "empirical atom must be finite");
    if (counts[i] < 0.0)
      fail(ErrorCode::DomainError, "empirical weight must be nonnegative");
    if (counts[i] == 0.0) continue;
    if (!e.atoms.empty() && e.atoms.back() == atoms[i]) {
      e.counts.back() += counts[i];
    } else {
      e.atoms.push_back(atoms[i]);
      e.counts.push_back(counts[i]);
    }
  }
  if (e.atoms.empty()) fail(ErrorCode::DomainError, "empirical with no mass");
  double total = 0.0;
  for (double c : e.counts) total += c;
  if (std::abs(total - den) > 1e-12 * den)
    fail(ErrorCode::DomainError, "empirical weights must sum to 1");
  return Distribution(std::move(e));
}

Distribution Distribution::empirical(std::vector<double> atoms,
                                     std::vector<double> weights) {
  return empirical_counts(std::move(atoms), std::move(weights), 1.0);
}

Distribution Distribution::from_sample(std::span<const double> xs) {
  if (xs.empty()) fail(ErrorCode::DomainError, "empty sample");
  std::vector<double> atoms(xs.begin(), xs.end());
  std::vector<double> counts(atoms.size(), 1.0);
  return empirical_counts(std::move(atoms), std::move(counts),
                          static_cast<double>(xs.size()));
}

Distribution Distribution::mixture(
    std::vector<std::pair<double, Distribution>> components) {
  if (components.empty()) fail(ErrorCode::DomainError, "empty mixture");
  double total = 0.0;
  bool all_atomic = true;
  for (auto& [w, d] : components) {
    if (w < 0.0) fail(ErrorCode::DomainError, "mixture weight < 0");
    total += w;
    if (!d.is_atomic()) all_atomic = false;
  }
  if (std::abs(total - 1.0) > 1e-12)
    fail(ErrorCode::DomainError, "mixture weights must sum to 1");
  if (all_atomic) {
    std::vector<double> atoms, counts;
    for (auto& [w, d] : components) {
      if (w == 0.0) continue;
      if (const auto* di = std::get_if<Dirac>(&d.form())) {
        atoms.push_back(di->c);
        counts.push_back(w);
      } else {
        const auto& e = std::get<Empirical>(d.form());
        for (std::size_t i = 0; i < e.atoms.size(); ++i) {
          atoms.push_back(e.atoms[i]);
          counts.push_back(w * (e.counts[i] / e.den));
        }
      }
    }
    return empirical_counts(std::move(atoms), std::move(counts), 1.0);
  }
  Mixture m;
  for (auto& [w, d] : components) {
    if (w == 0.0) continue;
    m.weights.push_back(w);
    m.components.push_back(std::make_shared<const Distribution>(std::move(d)));
  }
  if (m.weights.size() == 1) return *m.components[0];
  return Distribution(std::move(m));
}

std::string Distribution::describe() const {
  struct V {
    std::string operator()(const Normal& f) const {
      return "normal(" + std::to_string(f.m) + "," + std::to_string(f.sigma) +
             ")";
    }
    std::string operator()(const Exponential& f) const {
      return "exponential(" + std::to_string(f.theta) + ")";
    }
    std::string operator()(const Gamma& f) const {
      return "gamma(" + std::to_string(f.kappa) + "," +
             std::to_string(f.theta) + ")";
    }
    std::string operator()(const Pareto& f) const {
      return "pareto(" + std::to_string(f.a) + "," + std::to_string(f.x_min) +
             ")";
    }
    std::string operator()(const Gumbel& f) const {
      return "gumbel(" + std::to_string(f.a) + ")";
    }
    std::string operator()(const Dirac& f) const {
      return "dirac(" + std::to_string(f.c) + ")";
    }
    std::string operator()(const Empirical& f) const {
      std::ostringstream os;
      os << "empirical(" << f.atoms.size() << " atoms)";
      return os.str();
    }
    std::string operator()(const Mixture& f) const {
      std::ostringstream os;
      os << "mixture(" << f.components.size() << ")";
      return os.str();
    }
  };
  return std::visit(V{}, form_);
}

// ---------------------------------------------------------------------------
// cdf / quantile / density

double Distribution::cdf(double x) const {
  struct V {
    double x;
    double operator()(const Normal& f) const {
      return num::normal_cdf((x - f.m) / f.sigma);
    }
    double operator()(const Exponential& f) const {
      return x <= 0.0 ? 0.0 : -std::expm1(-x / f.theta);
    }
    double operator()(const Gamma& f) const {
      return x <= 0.0 ? 0.0 : num::gamma_p(f.kappa, x / f.theta);
    }
    double operator()(const Pareto& f) const {
      return x < f.x_min ? 0.0 : 1.0 - std::pow(f.x_min / x, f.a);
    }
    double operator()(const Gumbel& f) const {
      return std::exp(-std::exp(-f.a * x));
    }
    double operator()(const Dirac& f) const { return x >= f.c ? 1.0 : 0.0; }
    double operator()(const Empirical& f) const {
      auto it = std::upper_bound(f.atoms.begin(), f.atoms.end(), x);
      double cum = 0.0;
      for (std::size_t i = 0;
           i < static_cast<std::size_t>(it - f.atoms.begin()); ++i)
        cum += f.counts[i];
      return cum / f.den;
    }
    double operator()(const Mixture& f) const {
      double s = 0.0;
      for (std::size_t i = 0; i < f.weights.size(); ++i)
        s += f.weights[i] * f.components[i]->cdf(x);
      return s;
    }
  };
  return std::visit(V{x}, form_);
}

double Distribution::cdf_left(double x) const {
  return std::visit(
      overloaded{
          [x](const Dirac& f) { return x > f.c ? 1.0 : 0.0; },
          [x](const Empirical& f) {
            auto it = std::lower_bound(f.atoms.begin(), f.atoms.end(), x);
            double cum = 0.0;
            for (std::size_t i = 0;
                 i < static_cast<std::size_t>(it - f.atoms.begin()); ++i)
              cum += f.counts[i];
            return cum / f.den;
          },
          [x](const Mixture& f) {
            double s = 0.0;
            for (std::size_t i = 0; i < f.weights.size(); ++i)
              s += f.weights[i] * f.components[i]->cdf_left(x);
            return s;
          },
          [this, x](const auto&) { return cdf(x); }  // continuous kinds
      },
      form_);
}

double Distribution::quantile(double u) const {
  if (!(u > 0.0 && u < 1.0))
    fail(ErrorCode::DomainError, "quantile needs u in (0,1)");
  struct V {
    double u;
    const Distribution* self;
    double operator()(const Normal& f) const {
      return f.m + f.sigma * num::normal_quantile(u);
    }
    double operator()(const Exponential& f) const {
      return -f.theta * std::log1p(-u);
    }
    double operator()(const Gamma& f) const {
      // Wilson-Hilferty start, Newton polish, bisection fallback.
      const double z = num::normal_quantile(u);
      const double k = f.kappa;
      double x = k * std::pow(1.0 - 1.0 / (9.0 * k) + z / (3.0 * std::sqrt(k)),
                              3.0);
      if (!(x > 0.0)) x = k * 1e-8;
      x *= f.theta;
      bool ok = false;
      for (int i = 0; i < 40; ++i) {
        const double fx = num::gamma_p(k, x / f.theta) - u;
        const double dx = self->density(x);
        if (dx <= 0.0) break;
        const double step = fx / dx;
        const double nx = x - step;
        if (!(nx > 0.0)) {
          x *= 0.5;
          continue;
        }
        x = nx;
        if (std::abs(step) < 1e-12 * (1.0 + x)) {
          ok = true;
          break;
        }
      }
      if (!ok) {
        double hi = f.theta * (k + 1.0);
        while (num::gamma_p(k, hi / f.theta) < u && hi < 1e300) hi *= 2.0;
        x = num::bisect_threshold(
            [&](double t) { return num::gamma_p(k, t / f.theta) >= u; }, 0.0,
            hi, 1e-13 * (1.0 + hi));
      }
      return x;
    }
    double operator()(const Pareto& f) const {
      return f.x_min * std::exp(-std::log1p(-u) / f.a);
    }
    double operator()(const Gumbel& f) const {
      return -std::log(-std::log(u)) / f.a;
    }
    double operator()(const Dirac& f) const { return f.c; }
    double operator()(const Empirical& f) const {
      const double target = u * f.den;
      double cum = 0.0;
      for (std::size_t i = 0; i < f.atoms.size(); ++i) {
        cum += f.counts[i];
        if (cum >= target) return f.atoms[i];
      }
      return f.atoms.back();
    }
    double operator()(const Mixture& f) const {
      double lo = inf, hi = -inf;
      for (const auto& c : f.components) {
        lo = std::min(lo, c->quantile(u));
        hi = std::max(hi, c->quantile(u));
      }
      if (lo >= hi) return lo;
      // F(x) >= u switches once; bisect toward the left edge.
      double blo = lo - 1e-12 * (1.0 + std::abs(lo)) - 1e-300;
      double bhi = hi;
      if (self->cdf(blo) >= u) return lo;
      for (int i = 0; i < 200 && bhi - blo > 1e-13 * (1.0 + std::abs(bhi));
           ++i) {
        const double mid = 0.5 * (blo + bhi);
        if (mid <= blo || mid >= bhi) break;
        if (self->cdf(mid) >= u)
          bhi = mid;
        else
          blo = mid;
      }
      return bhi;
    }
  };
  return std::visit(V{u, this}, form_);
}

double Distribution::density(double x) const {
  struct V {
    double x;
    double operator()(const Normal& f) const {
      const double z = (x - f.m) / f.sigma;
      return std::exp(-0.5 * z * z) / (f.sigma * sqrt_two_pi());
    }
    double operator()(const Exponential& f) const {
      return x <= 0.0 ? 0.0 : std::exp(-x / f.theta) / f.theta;
    }
    double operator()(const Gamma& f) const {
      if (x <= 0.0) return 0.0;
      return std::exp((f.kappa - 1.0) * std::log(x) - x / f.theta -
                      f.kappa * std::log(f.theta) - std::lgamma(f.kappa));
    }
    double operator()(const Pareto& f) const {
      if (x < f.x_min) return 0.0;
      return f.a / f.x_min * std::pow(f.x_min / x, f.a + 1.0);
    }
    double operator()(const Gumbel& f) const {
      const double e = std::exp(-f.a * x);
      return f.a * std::exp(-f.a * x - e);
    }
    double operator()(const Dirac&) const {
      fail(ErrorCode::DomainError, "density of an atomic law");
    }
    double operator()(const Empirical&) const {
      fail(ErrorCode::DomainError, "density of an atomic law");
    }
    double operator()(const Mixture&) const {
      fail(ErrorCode::DomainError, "density of a mixture");
    }
  };
  return std::visit(V{x}, form_);
}

// ---------------------------------------------------------------------------
// Moments

bool Distribution::has_finite_mean() const {
  return std::visit(
      overloaded{[](const Pareto& f) { return f.a > 1.0; },
                 [](const Mixture& f) {
                   for (const auto& c : f.components)
                     if (!c->has_finite_mean()) return false;
                   return true;
                 },
                 [](const auto&) { return true; }},
      form_);
}

double Distribution::mean() const {
  struct V {
    double operator()(const Normal& f) const { return f.m; }
    double operator()(const Exponential& f) const { return f.theta; }
    double operator()(const Gamma& f) const { return f.kappa * f.theta; }
    double operator()(const Pareto& f) const {
      if (!(f.a > 1.0))
        fail(ErrorCode::OutsideDomain, "pareto mean diverges for a <= 1");
      return f.a * f.x_min / (f.a - 1.0);
    }
    double operator()(const Gumbel& f) const {
      return num::euler_gamma / f.a;
    }
    double operator()(const Dirac& f) const { return f.c; }
    double operator()(const Empirical& f) const {
      double s = 0.0;
      for (std::size_t i = 0; i < f.atoms.size(); ++i)
        s += f.counts[i] * f.atoms[i];
      return s / f.den;
    }
    double operator()(const Mixture& f) const {
      double s = 0.0;
      for (std::size_t i = 0; i < f.weights.size(); ++i)
        s += f.weights[i] * f.components[i]->mean();
      return s;
    }
  };
  return std::visit(V{}, form_);
}

bool Distribution::is_atomic() const {
  return std::holds_alternative<Dirac>(form_) ||
         std::holds_alternative<Empirical>(form_);
}

bool Distribution::has_atoms() const {
  if (is_atomic()) return true;
  if (const auto* m = std::get_if<Mixture>(&form_)) {
    for (const auto& c : m->components)
      if (c->has_atoms()) return true;
  }
  return false;
}

std::vector<double> Distribution::atom_positions() const {
  std::vector<double> out;
  if (const auto* d = std::get_if<Dirac>(&form_)) {
    out.push_back(d->c);
  } else if (const auto* e = std::get_if<Empirical>(&form_)) {
    out = e->atoms;
  } else if (const auto* m = std::get_if<Mixture>(&form_)) {
    for (const auto& c : m->components) {
      auto sub = c->atom_positions();
      out.insert(out.end(), sub.begin(), sub.end());
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
  }
  return out;
}

std::vector<double> Distribution::quantile_grid(std::size_t levels) const {
  std::vector<double> out;
  out.reserve(levels);
  for (std::size_t i = 1; i <= levels; ++i) {
    const double u = static_cast<double>(i) / (levels + 1.0);
    out.push_back(quantile(u));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Sampling

double SampleStream::draw(std::uint64_t index) const {
  return distribution.quantile(rng::uniform(seed, stream_id, index));
}

std::vector<double> SampleStream::sample(std::size_t n) const {
  if (n == 0) fail(ErrorCode::DomainError, "sample needs n >= 1");
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = draw(i);
  return out;
}

// ---------------------------------------------------------------------------
// Gauge integration

namespace {

// Tail growth envelope of a gauge on one side of the line:
// psi(x) <~ C (1 + |x|^poly) * exp(lambda |x|^alpha).
struct Growth {
  double poly = 0.0;
  double exp_lambda = 0.0;  // 0 means no exponential factor
  double exp_alpha = 0.0;
  bool known = true;
};

struct SideGrowth {
  Growth left, right;
};

SideGrowth classify_gauge(const GaugeFunction& g) {
  struct V {
    SideGrowth operator()(const GaugeFunction::Power& f) const {
      Growth gr{f.p, 0.0, 0.0, true};
      return {gr, gr};
    }
    SideGrowth operator()(const GaugeFunction::ExpPower& f) const {
      Growth gr{0.0, f.lambda, f.alpha, true};
      return {gr, gr};
    }
    SideGrowth operator()(const GaugeFunction::AbsLogDensity& f) const {
      if (f.model == LogDensityModel::Exponential) {
        Growth gr{1.0, 0.0, 0.0, true};
        return {gr, gr};
      }
      // |log a - ax - e^{-ax}|: linear to the right, exp(theta|x|) left.
      Growth right{1.0, 0.0, 0.0, true};
      Growth left{0.0, f.theta, 1.0, true};
      return {left, right};
    }
    SideGrowth operator()(const GaugeFunction::Constant1&) const {
      Growth gr{0.0, 0.0, 0.0, true};
      return {gr, gr};
    }
    SideGrowth operator()(const GaugeFunction::Scaled& f) const {
      switch (f.young.form()) {
        case YoungFunction::Form::Linear: {
          Growth gr{1.0, 0.0, 0.0, true};
          return {gr, gr};
        }
        case YoungFunction::Form::PowerOverP: {
          Growth gr{f.young.power(), 0.0, 0.0, true};
          return {gr, gr};
        }
        case YoungFunction::Form::Exponential: {
          const double beta = f.young.beta();
          Growth gr{0.0, std::pow(f.factor, beta), beta, true};
          return {gr, gr};
        }
        case YoungFunction::Form::Custom: {
          Growth gr;
          gr.known = false;
          return {gr, gr};
        }
      }
      Growth gr;
      gr.known = false;
      return {gr, gr};
    }
  };
  return std::visit(V{}, g.form());
}

// Integrability of the growth envelope against one tail of the law.
// Returns -1 diverges, 1 finite, 0 unknown.
int tail_ok(const Distribution& d, const Growth& gr, bool right) {
  if (!gr.known) return 0;
  // Exponential-tail densities: exp integrability hinges on lambda vs rate.
  auto exp_rate_rule = [&gr](double rate) {
    if (gr.exp_lambda > 0.0) {
      if (gr.exp_alpha < 1.0) return 1;
      if (gr.exp_alpha > 1.0) return -1;
      return gr.exp_lambda < rate ? 1 : -1;
    }
    return 1;
  };
  return std::visit(
      overloaded{
          [&gr](const Distribution::Normal& f) {
            if (gr.exp_lambda > 0.0 && gr.exp_alpha >= 2.0)
              return gr.exp_lambda < 1.0 / (2.0 * f.sigma * f.sigma) ? 1 : -1;
            return 1;
          },
          [&, right](const Distribution::Exponential& f) {
            return right ? exp_rate_rule(1.0 / f.theta) : 1;
          },
          [&, right](const Distribution::Gamma& f) {
            return right ? exp_rate_rule(1.0 / f.theta) : 1;
          },
          [&gr, right](const Distribution::Pareto& f) {
            if (!right) return 1;
            if (gr.exp_lambda > 0.0) return -1;
            return gr.poly < f.a ? 1 : -1;
          },
          [&, right](const Distribution::Gumbel& f) {
            // Double-exponential left tail dominates any single-exp gauge.
            return right ? exp_rate_rule(f.a) : 1;
          },
          [](const auto&) { return 1; }},
      d.form());
}

// -1 diverges, 1 finite, 0 unknown (quadrature with guard decides).
int gauge_integrable(const Distribution& d, const GaugeFunction& g) {
  if (d.is_atomic()) return 1;
  if (const auto* m = std::get_if<Distribution::Mixture>(&d.form())) {
    int verdict = 1;
    for (const auto& c : m->components) {
      const int v = gauge_integrable(*c, g);
      if (v < 0) return -1;
      if (v == 0) verdict = 0;
    }
    return verdict;
  }
  const SideGrowth sg = classify_gauge(g);
  const int l = tail_ok(d, sg.left, false);
  const int r = tail_ok(d, sg.right, true);
  if (l < 0 || r < 0) return -1;
  if (l == 0 || r == 0) return 0;
  return 1;
}

// Finite-support sums are always finite laws; gauge overflow saturates
// the value instead of flagging divergence.
GaugeIntegral atomic_gauge_sum(const Distribution::Empirical& e,
                               const GaugeFunction& g, double threshold) {
  double s = 0.0;
  for (std::size_t i = 0; i < e.atoms.size(); ++i) {
    const GaugeValue v = g.eval(e.atoms[i]);
    if (v.value >= threshold) s += e.counts[i] * v.value;
  }
  GaugeIntegral out;
  out.value = std::min(s / e.den, 1e300);
  return out;
}

// Absolute p-th moment in closed form where tabulated; nullopt-style via
// the `found` flag.
bool closed_abs_moment(const Distribution& d, double p, double& out) {
  if (const auto* f = std::get_if<Distribution::Exponential>(&d.form())) {
    out = std::exp(p * std::log(f->theta) + std::lgamma(p + 1.0));
    return true;
  }
  if (const auto* f = std::get_if<Distribution::Gamma>(&d.form())) {
    out = std::exp(p * std::log(f->theta) + std::lgamma(f->kappa + p) -
                   std::lgamma(f->kappa));
    return true;
  }
  if (const auto* f = std::get_if<Distribution::Pareto>(&d.form())) {
    if (p >= f->a) return false;  // divergence handled earlier
    out = f->a * std::pow(f->x_min, p) / (f->a - p);
    return true;
  }
  if (const auto* f = std::get_if<Distribution::Normal>(&d.form())) {
    if (f->m != 0.0) return false;
    out = std::pow(f->sigma, p) * std::pow(2.0, p / 2.0) *
          std::exp(std::lgamma((p + 1.0) / 2.0)) /
          std::sqrt(std::atan2(0.0, -1.0));
    return true;
  }
  return false;
}

// exp(lambda |x|^alpha) integrals in closed form where tabulated.
bool closed_exp_power(const Distribution& d, double lambda, double alpha,
                      double& out) {
  if (alpha == 1.0) {
    if (const auto* f = std::get_if<Distribution::Exponential>(&d.form())) {
      if (lambda * f->theta < 1.0) {
        out = 1.0 / (1.0 - lambda * f->theta);
        return true;
      }
      return false;
    }
    if (const auto* f = std::get_if<Distribution::Gamma>(&d.form())) {
      if (lambda * f->theta < 1.0) {
        out = std::pow(1.0 - lambda * f->theta, -f->kappa);
        return true;
      }
      return false;
    }
  }
  if (alpha == 2.0) {
    if (const auto* f = std::get_if<Distribution::Normal>(&d.form())) {
      const double s2 = f->sigma * f->sigma;
      const double q = 1.0 - 2.0 * lambda * s2;
      if (q > 0.0) {
        out = std::exp(lambda * f->m * f->m / q) / std::sqrt(q);
        return true;
      }
      return false;
    }
  }
  return false;
}

bool closed_form_integral(const Distribution& d, const GaugeFunction& g,
                          double& out) {
  struct V {
    const Distribution& d;
    double& out;
    bool operator()(const GaugeFunction::Power& f) const {
      return closed_abs_moment(d, f.p, out);
    }
    bool operator()(const GaugeFunction::ExpPower& f) const {
      return closed_exp_power(d, f.lambda, f.alpha, out);
    }
    bool operator()(const GaugeFunction::AbsLogDensity&) const {
      return false;
    }
    bool operator()(const GaugeFunction::Constant1&) const {
      out = 1.0;
      return true;
    }
    bool operator()(const GaugeFunction::Scaled& f) const {
      switch (f.young.form()) {
        case YoungFunction::Form::Linear: {
          double m;
          if (!closed_abs_moment(d, 1.0, m)) return false;
          out = f.factor * m;
          return true;
        }
        case YoungFunction::Form::PowerOverP: {
          const double p = f.young.power();
          double m;
          if (!closed_abs_moment(d, p, m)) return false;
          out = std::pow(f.factor, p) * m / p;
          return true;
        }
        case YoungFunction::Form::Exponential: {
          const double beta = f.young.beta();
          double e;
          if (!closed_exp_power(d, std::pow(f.factor, beta), beta, e))
            return false;
          out = e - 1.0;
          return true;
        }
        case YoungFunction::Form::Custom:
          return false;
      }
      return false;
    }
  };
  return std::visit(V{d, out}, g.form());
}

GaugeIntegral quadrature_gauge(const Distribution& d, const GaugeFunction& g,
                               const std::vector<double>& breakpoints) {
  double lo = -inf, hi = inf;
  if (std::holds_alternative<Distribution::Exponential>(d.form()) ||
      std::holds_alternative<Distribution::Gamma>(d.form()))
    lo = 0.0;
  if (const auto* f = std::get_if<Distribution::Pareto>(&d.form()))
    lo = f->x_min;
  auto integrand = [&d, &g](double x) {
    const double dens = d.density(x);
    return dens == 0.0 ? 0.0 : dens * g(x);
  };
  const num::QuadResult q =
      num::integrate_line(integrand, lo, hi, 1e-10, 1e-8, 4000, breakpoints);
  GaugeIntegral out;
  out.value = q.value;
  out.abs_error = q.abs_error;
  if (q.diverged) {
    out.diverges = true;
    return out;
  }
  if (!q.converged)
    fail(ErrorCode::QuadratureFailure,
         "gauge integral did not converge (error estimate " +
             std::to_string(q.abs_error) + ") for " + g.describe() + " vs " +
             d.describe());
  return out;
}

}  // namespace

GaugeIntegral integrate_gauge(const Distribution& d, const GaugeFunction& g) {
  if (const auto* di = std::get_if<Distribution::Dirac>(&d.form())) {
    const GaugeValue v = g.eval(di->c);
    return GaugeIntegral{v.value, 0.0, false};
  }
  if (const auto* e = std::get_if<Distribution::Empirical>(&d.form()))
    return atomic_gauge_sum(*e, g, -1.0);
  if (const auto* m = std::get_if<Distribution::Mixture>(&d.form())) {
    GaugeIntegral out;
    for (std::size_t i = 0; i < m->weights.size(); ++i) {
      const GaugeIntegral c = integrate_gauge(*m->components[i], g);
      if (c.diverges) return GaugeIntegral{0.0, 0.0, true};
      out.value += m->weights[i] * c.value;
      out.abs_error += m->weights[i] * c.abs_error;
    }
    return out;
  }
  const int verdict = gauge_integrable(d, g);
  if (verdict < 0) return GaugeIntegral{0.0, 0.0, true};
  double closed;
  if (verdict > 0 && closed_form_integral(d, g, closed))
    return GaugeIntegral{closed, 0.0, false};
  return quadrature_gauge(d, g, {});
}

namespace {

// Boundary points of {psi = a} for the analytic tail regions, sorted.
// The gauge forms are piecewise monotone with computable pieces.
std::vector<double> level_crossings(const GaugeFunction& g, double a) {
  struct V {
    double a;
    std::vector<double> operator()(const GaugeFunction::Power& f) const {
      const double r = std::pow(a, 1.0 / f.p);
      return {-r, r};
    }
    std::vector<double> operator()(const GaugeFunction::ExpPower& f) const {
      if (a <= 1.0) return {};  // psi >= 1 everywhere
      const double r = std::pow(std::log(a) / f.lambda, 1.0 / f.alpha);
      return {-r, r};
    }
    std::vector<double> operator()(const GaugeFunction::Constant1&) const {
      return {};
    }
    std::vector<double> operator()(const GaugeFunction::Scaled& f) const {
      if (a <= 0.0) return {};
      const double r = f.young.inverse(a) / f.factor;
      return {-r, r};
    }
    std::vector<double> operator()(
        const GaugeFunction::AbsLogDensity& f) const {
      std::vector<double> out;
      if (f.model == LogDensityModel::Exponential) {
        // |h| with h(x) = -log t - x/t linear: V at x0 = -t log t.
        const double t = f.theta;
        out.push_back(t * (-std::log(t) - a));
        out.push_back(t * (-std::log(t) + a));
      } else {
        // h(x) = log t - tx - e^{-tx}, increasing on (-inf,0], then
        // decreasing; solve h = +-a on each monotone piece.
        const double t = f.theta;
        auto h = [t](double x) {
          return std::log(t) - t * x - std::exp(-t * x);
        };
        auto solve_piece = [&](double lo, double hi, double target) {
          const double flo = h(lo) - target;
          const double fhi = h(hi) - target;
          if ((flo > 0.0) == (fhi > 0.0)) return;
          out.push_back(num::bisect_root(
              [&](double x) { return h(x) - target; }, lo, hi, 1e-13));
        };
        double span = 1.0;
        while (span < 1e8 && (h(-span) > -a - 10.0 || h(span) > -a - 10.0))
          span *= 2.0;
        for (double target : {a, -a}) {
          solve_piece(-span, 0.0, target);
          solve_piece(0.0, span, target);
        }
        std::sort(out.begin(), out.end());
      }
      return out;
    }
  };
  return std::visit(V{a}, g.form());
}

}  // namespace

GaugeIntegral tail_gauge_integral(const Distribution& d,
                                  const GaugeFunction& g, double a) {
  if (const auto* di = std::get_if<Distribution::Dirac>(&d.form())) {
    const GaugeValue v = g.eval(di->c);
    return GaugeIntegral{v.value >= a ? v.value : 0.0, 0.0, false};
  }
  if (const auto* e = std::get_if<Distribution::Empirical>(&d.form()))
    return atomic_gauge_sum(*e, g, a);
  if (const auto* m = std::get_if<Distribution::Mixture>(&d.form())) {
    GaugeIntegral out;
    for (std::size_t i = 0; i < m->weights.size(); ++i) {
      const GaugeIntegral c = tail_gauge_integral(*m->components[i], g, a);
      if (c.diverges) return GaugeIntegral{0.0, 0.0, true};
      out.value += m->weights[i] * c.value;
      out.abs_error += m->weights[i] * c.abs_error;
    }
    return out;
  }
  const int verdict = gauge_integrable(d, g);
  if (verdict < 0) return GaugeIntegral{0.0, 0.0, true};

  const std::vector<double> cross = level_crossings(g, a);
  double lo = -inf, hi = inf;
  if (std::holds_alternative<Distribution::Exponential>(d.form()) ||
      std::holds_alternative<Distribution::Gamma>(d.form()))
    lo = 0.0;
  if (const auto* f = std::get_if<Distribution::Pareto>(&d.form()))
    lo = f->x_min;
  auto integrand = [&d, &g, a](double x) {
    const double psi = g(x);
    if (psi < a) return 0.0;
    const double dens = d.density(x);
    return dens == 0.0 ? 0.0 : dens * psi;
  };
  const num::QuadResult q =
      num::integrate_line(integrand, lo, hi, 1e-10, 1e-8, 4000, cross);
  GaugeIntegral out;
  out.value = q.value;
  out.abs_error = q.abs_error;
  if (q.diverged) {
    out.diverges = true;
    return out;
  }
  if (!q.converged)
    fail(ErrorCode::QuadratureFailure,
         "tail gauge integral did not converge for " + g.describe() + " vs " +
             d.describe());
  return out;
}

double kolmogorov_distance(const Distribution& d, std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double ks = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = d.cdf(xs[i]);
    ks = std::max(ks, std::abs(f - static_cast<double>(i + 1) / n));
    ks = std::max(ks, std::abs(f - static_cast<double>(i) / n));
  }
  return ks;
}

}  // namespace wsetlab
