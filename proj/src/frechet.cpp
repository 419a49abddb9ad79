#include "wsetlab/frechet.hpp"

#include <algorithm>
#include <cmath>

#include "wsetlab/errors.hpp"
#include "wsetlab/numeric.hpp"
#include "wsetlab/rng.hpp"

namespace wsetlab {

namespace {

constexpr std::uint64_t slots_per_draw = 16;  // coordinate slots + selector
constexpr std::uint64_t selector_slot = 15;

void validate_spec(const FrechetSpec& spec) {
  if (spec.marginals.empty())
    fail(ErrorCode::DomainError, "coupling needs at least one marginal");
  if (spec.marginals.size() >= selector_slot)
    fail(ErrorCode::TooLarge, "at most 14 marginals are supported");
  if (std::holds_alternative<FrechetSpec::Countermonotone>(spec.coupling) &&
      spec.marginals.size() != 2)
    fail(ErrorCode::UnsupportedCoupling,
         "countermonotone coupling is defined for two marginals only");
}

// Spectral square root of the correlation matrix, PSD-validated.
std::vector<double> copula_root(const std::vector<double>& corr,
                                std::size_t d) {
  if (corr.size() != d * d)
    fail(ErrorCode::DomainError, "correlation matrix must be d*d");
  std::vector<double> v;
  std::vector<double> eig = num::jacobi_eigen(corr, static_cast<int>(d), v);
  for (double& e : eig) {
    if (e < -1e-10)
      fail(ErrorCode::DomainError,
           "correlation matrix is not positive semidefinite");
    e = e < 0.0 ? 0.0 : std::sqrt(e);
  }
  std::vector<double> root(d * d, 0.0);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < d; ++k)
        s += v[i * d + k] * eig[k] * v[j * d + k];
      root[i * d + j] = s;
    }
  return root;
}

struct CouplingSampler {
  const FrechetSpec& spec;
  std::vector<double> root;  // nonempty for the copula coupling

  explicit CouplingSampler(const FrechetSpec& s) : spec(s) {
    validate_spec(spec);
    if (const auto* g =
            std::get_if<FrechetSpec::GaussianCopula>(&spec.coupling))
      root = copula_root(g->correlation, spec.dimension());
  }

  std::vector<double> draw(std::uint64_t seed, std::uint64_t stream,
                           std::uint64_t index) const {
    const std::size_t d = spec.dimension();
    std::vector<double> u(d);
    const std::uint64_t base = index * slots_per_draw;
    if (std::holds_alternative<FrechetSpec::Comonotone>(spec.coupling)) {
      const double common = rng::uniform(seed, stream, base);
      std::fill(u.begin(), u.end(), common);
    } else if (std::holds_alternative<FrechetSpec::Countermonotone>(
                   spec.coupling)) {
      const double common = rng::uniform(seed, stream, base);
      u[0] = common;
      u[1] = 1.0 - common;
    } else if (!root.empty()) {
      std::vector<double> z(d);
      for (std::size_t i = 0; i < d; ++i)
        z[i] = num::normal_quantile(rng::uniform(seed, stream, base + i));
      for (std::size_t i = 0; i < d; ++i) {
        double s = 0.0;
        for (std::size_t k = 0; k < d; ++k) s += root[i * d + k] * z[k];
        u[i] = std::clamp(num::normal_cdf(s), 1e-15, 1.0 - 1e-15);
      }
    } else {
      for (std::size_t i = 0; i < d; ++i)
        u[i] = rng::uniform(seed, stream, base + i);
    }
    std::vector<double> y(d);
    for (std::size_t i = 0; i < d; ++i)
      y[i] = spec.marginals[i].quantile(u[i]);
    return y;
  }
};

}  // namespace

std::string FrechetSpec::coupling_name() const {
  struct V {
    std::string operator()(const Independent&) const { return "independent"; }
    std::string operator()(const Comonotone&) const { return "comonotone"; }
    std::string operator()(const Countermonotone&) const {
      return "countermonotone";
    }
    std::string operator()(const GaussianCopula&) const {
      return "gaussian_copula";
    }
  };
  return std::visit(V{}, coupling);
}

AggregationMap AggregationMap::identity() { return AggregationMap(Identity{}); }
AggregationMap AggregationMap::sum() { return AggregationMap(Sum{}); }
AggregationMap AggregationMap::max() { return AggregationMap(Max{}); }

AggregationMap AggregationMap::stop_loss_sum(std::vector<double> thresholds) {
  for (double t : thresholds)
    if (!(t > 0.0))
      fail(ErrorCode::DomainError, "stop-loss thresholds must be positive");
  return AggregationMap(StopLossSum{std::move(thresholds)});
}

AggregationMap AggregationMap::aggregate_stop_loss(double threshold) {
  if (!(threshold > 0.0))
    fail(ErrorCode::DomainError, "stop-loss threshold must be positive");
  return AggregationMap(AggregateStopLoss{threshold});
}

bool AggregationMap::scalar_valued() const {
  return !std::holds_alternative<Identity>(form_);
}

double AggregationMap::apply(std::span<const double> x) const {
  struct V {
    std::span<const double> x;
    double operator()(const Identity&) const {
      fail(ErrorCode::DomainError, "identity map has no scalar image");
    }
    double operator()(const Sum&) const {
      double s = 0.0;
      for (double v : x) s += v;
      return s;
    }
    double operator()(const Max&) const {
      double m = x[0];
      for (double v : x) m = std::max(m, v);
      return m;
    }
    double operator()(const StopLossSum& f) const {
      if (f.thresholds.size() != x.size())
        fail(ErrorCode::DomainError, "threshold count mismatch");
      double s = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i)
        s += std::max(x[i] - f.thresholds[i], 0.0);
      return s;
    }
    double operator()(const AggregateStopLoss& f) const {
      double s = 0.0;
      for (double v : x) s += v;
      return std::max(s - f.threshold, 0.0);
    }
  };
  return std::visit(V{x}, form_);
}

std::pair<double, double> AggregationMap::lipschitz_bound() const {
  return {0.0, 1.0};  // every shipped map satisfies |A(x)| <= sum |x_i|
}

std::string AggregationMap::describe() const {
  struct V {
    std::string operator()(const Identity&) const { return "identity"; }
    std::string operator()(const Sum&) const { return "sum"; }
    std::string operator()(const Max&) const { return "max"; }
    std::string operator()(const StopLossSum&) const {
      return "stop_loss_sum";
    }
    std::string operator()(const AggregateStopLoss&) const {
      return "aggregate_stop_loss";
    }
  };
  return std::visit(V{}, form_);
}

std::vector<double> sample_vector(const FrechetSpec& spec, std::uint64_t seed,
                                  std::uint64_t stream, std::uint64_t index) {
  return CouplingSampler(spec).draw(seed, stream, index);
}

Distribution sample_aggregate(const FrechetSpec& spec, const AggregationMap& A,
                              std::uint64_t seed, std::uint64_t stream,
                              std::size_t n) {
  if (!A.scalar_valued())
    fail(ErrorCode::DomainError,
         "identity map is sample-only; use sample_vector");
  if (n == 0) fail(ErrorCode::DomainError, "need n >= 1 draws");
  const CouplingSampler sampler(spec);
  std::vector<double> values(n);
  for (std::size_t i = 0; i < n; ++i)
    values[i] = A.apply(sampler.draw(seed, stream, i));
  return Distribution::from_sample(values);
}

std::vector<double> sample_aggregate_values_mixed(
    const FrechetSpec& base, const FrechetSpec& observed, double t,
    const AggregationMap& A, std::uint64_t seed, std::uint64_t stream,
    std::size_t n) {
  if (base.dimension() != observed.dimension())
    fail(ErrorCode::DomainError, "mixed couplings need equal dimension");
  if (!(t >= 0.0 && t <= 1.0))
    fail(ErrorCode::DomainError, "mixing parameter must lie in [0,1]");
  const CouplingSampler sb(base);
  const CouplingSampler so(observed);
  std::vector<double> values(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double sel =
        rng::uniform(seed, stream, i * slots_per_draw + selector_slot);
    const auto& sampler = sel < t ? so : sb;
    values[i] = A.apply(sampler.draw(seed, stream, i));
  }
  return values;
}

namespace {

// Gauge x -> psi(s x) expressed as multiplier * g'(x).
struct RescaledGauge {
  GaugeFunction gauge;
  double multiplier;
};

RescaledGauge rescale_gauge(const GaugeFunction& psi, double s) {
  struct V {
    double s;
    RescaledGauge operator()(const GaugeFunction::Power& f) const {
      return {GaugeFunction::power(f.p), std::pow(s, f.p)};
    }
    RescaledGauge operator()(const GaugeFunction::ExpPower& f) const {
      return {GaugeFunction::exp_power(f.lambda * std::pow(s, f.alpha),
                                       f.alpha),
              1.0};
    }
    RescaledGauge operator()(const GaugeFunction::Constant1&) const {
      return {GaugeFunction::constant1(), 1.0};
    }
    RescaledGauge operator()(const GaugeFunction::Scaled& f) const {
      return {GaugeFunction::scaled(f.young, f.factor * s), 1.0};
    }
    RescaledGauge operator()(const GaugeFunction::AbsLogDensity&) const {
      fail(ErrorCode::InvalidGauge, "log-density gauges are not convex/even");
    }
  };
  return std::visit(V{s}, psi.form());
}

}  // namespace

double aggregation_tail_bound(const FrechetSpec& spec, const AggregationMap& A,
                              const GaugeFunction& psi_k, double a) {
  const std::size_t d = spec.dimension();
  const auto [b, c] = A.lipschitz_bound();
  const double scale = (static_cast<double>(d) + 1.0) * c;
  const RescaledGauge rg = rescale_gauge(psi_k, scale);
  double bound = 0.0;
  // Constant-slot contribution from the affine offset b.
  const double w0 = psi_k((static_cast<double>(d) + 1.0) * b);
  if (w0 >= a) bound += w0;
  for (std::size_t i = 0; i < d; ++i) {
    const GaugeIntegral tail = tail_gauge_integral(
        spec.marginals[i], rg.gauge, a / rg.multiplier);
    if (tail.diverges)
      fail(ErrorCode::OutsideDomain,
           "marginal " + std::to_string(i) +
               " has a divergent rescaled gauge integral");
    bound += rg.multiplier * tail.value;
  }
  return bound;
}

UniformIntegrabilityReport aggregation_ui_bound(const FrechetSpec& spec,
                                                const AggregationMap& A,
                                                const GaugeSequence& gauges,
                                                int depth, double epsilon) {
  validate_spec(spec);
  if (!gauges.convex_even())
    fail(ErrorCode::InvalidGauge,
         "aggregation bound needs convex, even gauges");
  if (depth < 1) fail(ErrorCode::DomainError, "depth >= 1 required");
  UniformIntegrabilityReport report;
  report.family_size = spec.dimension();
  report.note =
      "coupling-uniform bound evaluated on the marginals; sampled couplings "
      "are spot checks of one face each";
  report.pass = true;
  for (int k = 1; k <= depth; ++k) {
    const GaugeFunction psi = gauges.at(k);
    UniformIntegrabilityEntry entry;
    entry.k = k;
    entry.epsilon = epsilon;
    auto bound_at = [&](double a) {
      return aggregation_tail_bound(spec, A, psi, a);
    };
    const double last = std::pow(2.0, 120.0 / 4.0);
    if (bound_at(last) > epsilon) {
      entry.found = false;
      entry.threshold = last;
      entry.achieved_sup = bound_at(last);
      report.pass = false;
      report.per_k.push_back(entry);
      continue;
    }
    int lo = 0, hi = 120;
    if (bound_at(1.0) <= epsilon) {
      hi = 0;
    } else {
      while (hi - lo > 1) {
        const int mid = (lo + hi) / 2;
        if (bound_at(std::pow(2.0, mid / 4.0)) <= epsilon)
          hi = mid;
        else
          lo = mid;
      }
    }
    entry.found = true;
    entry.threshold = std::pow(2.0, hi / 4.0);
    entry.achieved_sup = bound_at(entry.threshold);
    report.per_k.push_back(entry);
  }
  return report;
}

}  // namespace wsetlab
