#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "wsetlab/errors.hpp"
#include "wsetlab/frechet.hpp"
#include "wsetlab/rng.hpp"

using namespace wsetlab;

TEST_CASE("degenerate marginals aggregate to point masses") {
  FrechetSpec spec;
  spec.marginals = {Distribution::dirac(1.0), Distribution::dirac(2.0)};
  for (int variant = 0; variant < 3; ++variant) {
    if (variant == 1) spec.coupling = FrechetSpec::Comonotone{};
    if (variant == 2) spec.coupling = FrechetSpec::Countermonotone{};
    const Distribution sum =
        sample_aggregate(spec, AggregationMap::sum(), 1, 0, 50);
    CHECK(sum.atom_positions() == std::vector<double>{3.0});
    const Distribution mx =
        sample_aggregate(spec, AggregationMap::max(), 1, 0, 50);
    CHECK(mx.atom_positions() == std::vector<double>{2.0});
  }
}

TEST_CASE("comonotone sum of two identical exponentials is a doubled exponential") {
  FrechetSpec spec;
  spec.marginals = {Distribution::exponential(1.0),
                    Distribution::exponential(1.0)};
  spec.coupling = FrechetSpec::Comonotone{};
  const Distribution law =
      sample_aggregate(spec, AggregationMap::sum(), 7, 0, 10000);
  CHECK(std::abs(law.mean() - 2.0) < 0.06);
  // 2 F^{<-}(U) with an exponential marginal is exponential with mean 2.
  const auto& e = std::get<Distribution::Empirical>(law.form());
  std::vector<double> xs;
  for (std::size_t i = 0; i < e.atoms.size(); ++i)
    for (int c = 0; c < static_cast<int>(e.counts[i]); ++c)
      xs.push_back(e.atoms[i]);
  CHECK(kolmogorov_distance(Distribution::exponential(2.0), xs) < 0.02);
}

TEST_CASE("comonotone draws share the same uniform level") {
  FrechetSpec spec;
  spec.marginals = {Distribution::exponential(1.0),
                    Distribution::gamma(2.0, 1.0)};
  spec.coupling = FrechetSpec::Comonotone{};
  for (std::uint64_t i = 0; i < 20; ++i) {
    const auto y = sample_vector(spec, 3, 1, i);
    CHECK(spec.marginals[0].cdf(y[0]) ==
          doctest::Approx(spec.marginals[1].cdf(y[1])).epsilon(1e-9));
  }
}

TEST_CASE("every coupling reproduces the declared marginals") {
  const std::vector<FrechetSpec::Coupling> couplings = {
      FrechetSpec::Independent{}, FrechetSpec::Comonotone{},
      FrechetSpec::Countermonotone{},
      FrechetSpec::GaussianCopula{{1.0, 0.8, 0.8, 1.0}}};
  std::uint64_t stream = 0;
  for (const auto& coupling : couplings) {
    FrechetSpec spec;
    spec.marginals = {Distribution::exponential(1.0),
                      Distribution::normal(0.0, 1.0)};
    spec.coupling = coupling;
    std::vector<double> first, second;
    for (std::uint64_t i = 0; i < 10000; ++i) {
      const auto y = sample_vector(spec, 17, stream, i);
      first.push_back(y[0]);
      second.push_back(y[1]);
    }
    CHECK(kolmogorov_distance(spec.marginals[0], first) < 0.02);
    CHECK(kolmogorov_distance(spec.marginals[1], second) < 0.02);
    ++stream;
  }
}

TEST_CASE("countermonotone needs exactly two marginals") {
  FrechetSpec spec;
  spec.marginals = {Distribution::exponential(1.0),
                    Distribution::exponential(1.0),
                    Distribution::exponential(1.0)};
  spec.coupling = FrechetSpec::Countermonotone{};
  CHECK_THROWS_AS(sample_vector(spec, 1, 0, 0), Error);
  try {
    sample_vector(spec, 1, 0, 0);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UnsupportedCoupling);
  }
}

TEST_CASE("gaussian copula: correlation is realized, non-psd rejected") {
  FrechetSpec spec;
  spec.marginals = {Distribution::normal(0.0, 1.0),
                    Distribution::normal(0.0, 1.0)};
  spec.coupling = FrechetSpec::GaussianCopula{{1.0, 0.8, 0.8, 1.0}};
  double sxy = 0.0, sx = 0.0, sy = 0.0, sxx = 0.0, syy = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const auto y = sample_vector(spec, 23, 0, static_cast<std::uint64_t>(i));
    sx += y[0];
    sy += y[1];
    sxx += y[0] * y[0];
    syy += y[1] * y[1];
    sxy += y[0] * y[1];
  }
  const double corr = (sxy / n - sx / n * sy / n) /
                      std::sqrt((sxx / n - sx / n * sx / n) *
                                (syy / n - sy / n * sy / n));
  CHECK(corr == doctest::Approx(0.8).epsilon(0.05));

  FrechetSpec bad = spec;
  bad.coupling = FrechetSpec::GaussianCopula{{1.0, 2.0, 2.0, 1.0}};
  CHECK_THROWS_AS(sample_vector(bad, 1, 0, 0), Error);
}

TEST_CASE("affine growth certificate holds on random points") {
  const AggregationMap maps[] = {
      AggregationMap::sum(), AggregationMap::max(),
      AggregationMap::stop_loss_sum({0.5, 1.0, 2.0}),
      AggregationMap::aggregate_stop_loss(1.5)};
  for (const auto& A : maps) {
    const auto [b, c] = A.lipschitz_bound();
    for (int i = 0; i < 10000; ++i) {
      double x[3], l1 = 0.0;
      for (int j = 0; j < 3; ++j) {
        x[j] = 20.0 * rng::uniform(29, i, j) - 10.0;
        l1 += std::abs(x[j]);
      }
      CHECK(std::abs(A.apply(std::span<const double>(x, 3))) <=
            b + c * l1 + 1e-12);
    }
  }
}

TEST_CASE("aggregation bound: exponential marginals with linear young gauges") {
  FrechetSpec spec;
  spec.marginals = {Distribution::exponential(1.0),
                    Distribution::exponential(1.0)};
  const GaugeSequence gauges =
      GaugeSequence::young_scaled(YoungFunction::linear());
  const auto report =
      aggregation_ui_bound(spec, AggregationMap::sum(), gauges, 3, 0.01);
  CHECK(report.pass);
  for (const auto& e : report.per_k) {
    CHECK(e.found);
    CHECK(e.achieved_sup <= 0.01);
  }
  // Closed form of the bound: two marginals, scale (d+1)c = 3, so
  // bound(a; k) = 2 * 3k (1 + a/(3k)) exp(-a/(3k)).
  for (int k = 1; k <= 3; ++k) {
    for (double a : {2.0, 10.0, 40.0}) {
      const double got =
          aggregation_tail_bound(spec, AggregationMap::sum(), gauges.at(k), a);
      const double s = 3.0 * k;
      const double expected = 2.0 * (a + s) * std::exp(-a / s);
      CHECK(got == doctest::Approx(expected).epsilon(1e-6));
    }
  }
}

TEST_CASE("aggregation bound: degenerate marginals pass at the first grid point") {
  FrechetSpec spec;
  spec.marginals = {Distribution::dirac(0.0), Distribution::dirac(0.0),
                    Distribution::dirac(0.0)};
  const auto report = aggregation_ui_bound(
      spec, AggregationMap::sum(),
      GaugeSequence::young_scaled(YoungFunction::power_over_p(2.0)), 2, 1e-9);
  CHECK(report.pass);
  for (const auto& e : report.per_k) CHECK(e.threshold == 1.0);
}

TEST_CASE("aggregation bound: heavy-tailed marginal is outside the domain") {
  FrechetSpec spec;
  spec.marginals = {Distribution::exponential(1.0),
                    Distribution::pareto(2.0, 1.0)};
  CHECK_THROWS_AS(
      aggregation_ui_bound(spec, AggregationMap::sum(),
                           GaugeSequence::young_scaled(
                               YoungFunction::power_over_p(3.0)),
                           2, 0.01),
      Error);
}

TEST_CASE("aggregation bound rejects non-convex gauge sequences") {
  FrechetSpec spec;
  spec.marginals = {Distribution::exponential(1.0)};
  CHECK_THROWS_AS(
      aggregation_ui_bound(
          spec, AggregationMap::sum(),
          GaugeSequence::log_density_enumeration(LogDensityModel::Exponential),
          1, 0.01),
      Error);
}

TEST_CASE("sampled image tails stay below the coupling-uniform bound") {
  FrechetSpec base;
  base.marginals = {Distribution::exponential(1.0),
                    Distribution::exponential(1.0)};
  const GaugeSequence gauges =
      GaugeSequence::young_scaled(YoungFunction::linear());
  const std::vector<FrechetSpec::Coupling> couplings = {
      FrechetSpec::Independent{}, FrechetSpec::Comonotone{},
      FrechetSpec::Countermonotone{},
      FrechetSpec::GaussianCopula{{1.0, -0.5, -0.5, 1.0}}};
  std::uint64_t stream = 100;
  for (const auto& coupling : couplings) {
    FrechetSpec spec = base;
    spec.coupling = coupling;
    const Distribution law =
        sample_aggregate(spec, AggregationMap::sum(), 37, stream++, 20000);
    for (int k = 1; k <= 2; ++k) {
      for (double a : {1.0, 4.0, 16.0}) {
        const double sampled = tail_gauge_integral(law, gauges.at(k), a).value;
        const double bound = aggregation_tail_bound(
            base, AggregationMap::sum(), gauges.at(k), a);
        CHECK(sampled <= bound + 1e-6);
      }
    }
  }
}

TEST_CASE("mixed coupling sampler: endpoints reproduce the pure couplings") {
  FrechetSpec indep;
  indep.marginals = {Distribution::exponential(1.0),
                     Distribution::exponential(1.0)};
  FrechetSpec comon = indep;
  comon.coupling = FrechetSpec::Comonotone{};
  const AggregationMap A = AggregationMap::sum();

  const auto at_zero = sample_aggregate_values_mixed(indep, comon, 0.0, A,
                                                     91, 5, 64);
  const auto at_one = sample_aggregate_values_mixed(indep, comon, 1.0, A,
                                                    91, 5, 64);
  for (std::uint64_t i = 0; i < 64; ++i) {
    const auto yi = sample_vector(indep, 91, 5, i);
    const auto yc = sample_vector(comon, 91, 5, i);
    CHECK(at_zero[i] == yi[0] + yi[1]);
    CHECK(at_one[i] == yc[0] + yc[1]);
  }
}
