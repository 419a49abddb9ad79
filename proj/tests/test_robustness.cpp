#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "wsetlab/errors.hpp"
#include "wsetlab/frechet.hpp"
#include "wsetlab/metrics.hpp"
#include "wsetlab/robustness.hpp"

using namespace wsetlab;

TEST_CASE("estimator law of a degenerate source is degenerate") {
  const EstimatorLaw law = estimator_law(
      StatisticalFunctional::mean(),
      distribution_source(Distribution::dirac(4.0)), 17, 50, 99);
  CHECK(law.failures == 0);
  CHECK(law.law.atom_positions() == std::vector<double>{4.0});
}

TEST_CASE("estimator law concentrates at the CLT scale") {
  const std::size_t n = 100, R = 2000;
  const EstimatorLaw law = estimator_law(
      StatisticalFunctional::mean(),
      distribution_source(Distribution::exponential(1.0)), n, R, 7);
  CHECK(law.failures == 0);
  CHECK(std::abs(law.law.mean() - 1.0) <
        3.0 / std::sqrt(static_cast<double>(n * R)) * 3.0);
}

TEST_CASE("exponential-model estimator equals the sample mean law") {
  const DataSource src = distribution_source(Distribution::exponential(2.0));
  const EstimatorLaw a =
      estimator_law(StatisticalFunctional::mean(), src, 20, 300, 5);
  const EstimatorLaw b =
      estimator_law(StatisticalFunctional::mle_exponential(), src, 20, 300, 5);
  CHECK(a.law.atom_positions() == b.law.atom_positions());
}

TEST_CASE("abort when too many replications fail") {
  CHECK_THROWS_AS(
      estimator_law(StatisticalFunctional::mle_gumbel(),
                    distribution_source(Distribution::dirac(0.0)), 5, 100, 1),
      Error);
}

TEST_CASE("profile at t = 0 is exactly flat under paired seeds") {
  const ContaminationPath path = ContaminationPath::within_family(
      [](double t) { return Distribution::exponential(1.0 + 0.05 * t); },
      {0.0, 1.0});
  const RobustnessProfile prof =
      robustness_profile(StatisticalFunctional::mle_exponential(),
                         Distribution::exponential(1.0), path, {10, 100}, 400,
                         2024);
  for (const auto& row : prof.rows) {
    if (row.t == 0.0) {
      CHECK(row.pi_hat == 0.0);
      CHECK(row.mc_se == 0.0);
    } else {
      CHECK(row.pi_hat <= 0.1);
    }
    CHECK(row.failures == 0);
  }
  REQUIRE(prof.sup_over_n.size() == 2);
  CHECK(prof.sup_over_n[0].second == 0.0);
  CHECK(prof.sup_over_n[1].second <= 0.1);
}

TEST_CASE("within-family profiles trend monotonically in t") {
  const ContaminationPath path = ContaminationPath::within_family(
      [](double t) { return Distribution::exponential(1.0 + 0.4 * t); },
      {0.0, 0.25, 0.5, 1.0});
  const RobustnessProfile prof = robustness_profile(
      StatisticalFunctional::mle_exponential(), Distribution::exponential(1.0),
      path, {50}, 400, 11);
  double prev = -1.0, prev_se = 0.0;
  for (const auto& [t, sup] : prof.sup_over_n) {
    (void)t;
    CHECK(sup >= prev - 2.0 * (prev_se + 1e-12));
    prev = sup;
  }
  for (const auto& row : prof.rows) prev_se = std::max(prev_se, row.mc_se);
}

TEST_CASE("point-mass contamination breaks the mean while staying weakly close") {
  const Distribution base = Distribution::exponential(1.0);
  const ContaminationPath path =
      ContaminationPath::point_mass(base, 1000.0, {0.01});
  const RobustnessProfile prof = robustness_profile(
      StatisticalFunctional::mean(), base, path, {300}, 400, 31);
  REQUIRE(prof.rows.size() == 1);
  CHECK(prof.rows[0].pi_hat >= 0.8);
  CHECK(levy_distance(base, path.at(0.01)).value <= 0.02);
}

TEST_CASE("contamination path endpoints") {
  const Distribution base = Distribution::exponential(1.0);
  const ContaminationPath pm =
      ContaminationPath::point_mass(base, 5.0, {0.0, 0.5, 1.0});
  CHECK(levy_distance(pm.at(0.0), base).value == 0.0);
  CHECK(pm.at(1.0).atom_positions() == std::vector<double>{5.0});
  const ContaminationPath gm = ContaminationPath::general_mixture(
      base, Distribution::normal(0.0, 1.0), {0.0, 1.0});
  CHECK(levy_distance(gm.at(0.0), base).value == 0.0);
  CHECK_THROWS_AS(gm.at(1.5), Error);
}

TEST_CASE("breakdown demo: weak collapse with a pinned mean") {
  const BreakdownReport rep = breakdown_demo_mean({10, 100, 1000, 10000});
  REQUIRE(rep.rows.size() == 4);
  for (const auto& row : rep.rows) {
    CHECK(row.mean_value == 1.0);
    CHECK(std::abs(row.levy_to_limit - 1.0 / row.n) <= 2e-9);
  }
  CHECK(rep.max_mean_gap == 0.0);
  // The sample laws approach the point mass weakly.
  CHECK(rep.rows.back().levy_to_limit < 1e-3);
}

TEST_CASE("coupling sweep: profile is finite and continuous in the mix") {
  FrechetSpec indep;
  indep.marginals = {Distribution::exponential(1.0),
                     Distribution::exponential(1.0)};
  FrechetSpec comon = indep;
  comon.coupling = FrechetSpec::Comonotone{};
  const AggregationMap A = AggregationMap::sum();
  const StatisticalFunctional T =
      StatisticalFunctional::risk(RiskFunctionalSpec::avar(0.1));
  const DataSource base = [&](std::uint64_t seed, std::uint64_t stream,
                              std::size_t n) {
    return sample_aggregate_values_mixed(indep, comon, 0.0, A, seed, stream,
                                         n);
  };
  const auto path = [&](double t) -> DataSource {
    return [&indep, &comon, &A, t](std::uint64_t seed, std::uint64_t stream,
                                   std::size_t n) {
      return sample_aggregate_values_mixed(indep, comon, t, A, seed, stream,
                                           n);
    };
  };
  const RobustnessProfile prof = robustness_profile_sources(
      T, base, path, {0.0, 0.5, 1.0}, {50}, 300, 77);
  double prev = -1.0;
  for (const auto& [t, sup] : prof.sup_over_n) {
    (void)t;
    CHECK(sup >= 0.0);
    CHECK(sup <= 1.0);
    if (prev >= 0.0) CHECK(std::abs(sup - prev) <= 0.4);
    prev = sup;
  }
  CHECK(prof.sup_over_n[0].second == 0.0);  // paired seeds at t = 0
}
