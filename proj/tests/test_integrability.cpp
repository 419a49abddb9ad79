#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "wsetlab/errors.hpp"
#include "wsetlab/integrability.hpp"

using namespace wsetlab;

TEST_CASE("uniform integrating check on an exponential family") {
  const std::vector<Distribution> family = {Distribution::exponential(0.5),
                                            Distribution::exponential(1.0),
                                            Distribution::exponential(2.0)};
  const GaugeSequence seq = GaugeSequence::constant(GaugeFunction::power(1.0));
  const auto report = uniform_integrating_check(family, seq, 1, 0.01);
  REQUIRE(report.pass);
  REQUIRE(report.per_k.size() == 1);
  const auto& e = report.per_k[0];
  CHECK(e.found);
  // Worst member is theta = 2 with tail (a + 2) e^{-a/2}; the exact
  // crossing is near 15.1, so the 2^{j/4} grid answers with the first
  // grid point past it.
  auto closed_tail = [](double a) { return (a + 2.0) * std::exp(-a / 2.0); };
  int j = 0;
  while (closed_tail(std::pow(2.0, j / 4.0)) > 0.01) ++j;
  CHECK(e.threshold == doctest::Approx(std::pow(2.0, j / 4.0)));
  CHECK(e.threshold >= 15.1);
  CHECK(e.threshold <= 15.1 * std::pow(2.0, 0.25));
  CHECK(e.achieved_sup <= 0.01);
  CHECK(e.achieved_sup == doctest::Approx(closed_tail(e.threshold)).epsilon(1e-6));
}

TEST_CASE("uniform integrating check: single dirac passes at the first grid point") {
  const auto report = uniform_integrating_check(
      {Distribution::dirac(0.0)},
      GaugeSequence::constant(GaugeFunction::power(2.0)), 3, 1e-6);
  CHECK(report.pass);
  for (const auto& e : report.per_k) {
    CHECK(e.found);
    CHECK(e.threshold == 1.0);  // psi(0) = 0 < every grid point
    CHECK(e.achieved_sup == 0.0);
  }
}

TEST_CASE("uniform integrating check: divergent member is outside the domain") {
  CHECK_THROWS_AS(
      uniform_integrating_check({Distribution::pareto(2.0, 1.0)},
                                GaugeSequence::constant(GaugeFunction::power(3.0)),
                                1, 0.01),
      Error);
}

TEST_CASE("threshold grows as epsilon shrinks, never the other way") {
  const std::vector<Distribution> family = {Distribution::exponential(1.0),
                                            Distribution::gamma(2.0, 1.0)};
  const GaugeSequence seq = GaugeSequence::constant(GaugeFunction::power(2.0));
  double prev = 0.0;
  for (double eps : {0.1, 0.01, 0.001}) {
    const auto r = uniform_integrating_check(family, seq, 1, eps);
    REQUIRE(r.pass);
    CHECK(r.per_k[0].threshold >= prev);  // smaller eps, larger threshold
    prev = r.per_k[0].threshold;
  }
}

TEST_CASE("subfamily threshold never exceeds the family threshold") {
  const std::vector<Distribution> small = {Distribution::exponential(1.0)};
  const std::vector<Distribution> big = {Distribution::exponential(1.0),
                                         Distribution::exponential(2.0)};
  const GaugeSequence seq = GaugeSequence::constant(GaugeFunction::power(1.0));
  const auto rs = uniform_integrating_check(small, seq, 1, 0.01);
  const auto rb = uniform_integrating_check(big, seq, 1, 0.01);
  REQUIRE(rs.pass);
  REQUIRE(rb.pass);
  CHECK(rs.per_k[0].threshold <= rb.per_k[0].threshold);
}

TEST_CASE("condition (e) passes for a parameter-converging exponential sequence") {
  const auto family = [](int n) {
    return Distribution::exponential(1.0 + 1.0 / static_cast<double>(n));
  };
  const auto report = sequence_condition_e(
      family, Distribution::exponential(1.0),
      GaugeSequence::constant(GaugeFunction::power(1.0)), 1, 100, 0.02);
  CHECK(report.pass);
  CHECK(report.failing_k == -1);
  // The first-moment gap is exactly 1/n.
  for (std::size_t i = 0; i < report.n_values.size(); ++i) {
    CHECK(report.gauge_gaps[0][i] ==
          doctest::Approx(1.0 / report.n_values[i]).epsilon(1e-9));
  }
}

TEST_CASE("condition (e) fails for the escaping point mass, gap exactly one") {
  const auto family = [](int n) {
    const double nd = static_cast<double>(n);
    return Distribution::empirical_counts({0.0, nd}, {nd - 1.0, 1.0}, nd);
  };
  const auto report = sequence_condition_e(
      family, Distribution::dirac(0.0),
      GaugeSequence::constant(GaugeFunction::power(1.0)), 1, 100, 0.02);
  CHECK_FALSE(report.pass);
  CHECK(report.failing_k == 1);
  for (std::size_t i = 0; i < report.n_values.size(); ++i) {
    CHECK(report.gauge_gaps[0][i] == 1.0);
    CHECK(report.levy_gaps[i] <=
          1.0 / static_cast<double>(report.n_values[i]) + 1e-8);
  }
}

TEST_CASE("condition (e) trivially passes on a constant sequence") {
  const Distribution mu = Distribution::gamma(2.0, 1.0);
  const auto report = sequence_condition_e(
      [&mu](int) { return mu; }, mu,
      GaugeSequence::constant(GaugeFunction::power(1.0)), 1, 10, 1e-9);
  CHECK(report.pass);
  for (double g : report.gauge_gaps[0]) CHECK(g == 0.0);
  for (double l : report.levy_gaps) CHECK(l <= 1e-9);
}

TEST_CASE("parametric check: gumbel family with log-density gauges") {
  std::vector<Distribution> grid;
  for (double a : {0.5, 1.0, 2.0, 4.0}) grid.push_back(Distribution::gumbel(a));
  ParametricProbe probe{
      [](int n) { return Distribution::gumbel(1.0 + 0.02 / n); },
      Distribution::gumbel(1.0), 40};
  const auto report = parametric_wset_check(
      grid, GaugeSequence::log_density_enumeration(LogDensityModel::Gumbel), 5,
      {probe}, 0.02);
  CHECK(report.injectivity_ok);
  CHECK(report.pass);
}

TEST_CASE("parametric check: exponential family with slow exp ladder") {
  std::vector<Distribution> grid;
  for (double t : {0.5, 1.0, 2.0}) grid.push_back(Distribution::exponential(t));
  ParametricProbe probe{
      [](int n) { return Distribution::exponential(1.0 + 0.01 / n); },
      Distribution::exponential(1.0), 40};
  const auto report = parametric_wset_check(
      grid, GaugeSequence::exp_ladder(1.0), 4, {probe}, 0.02);
  CHECK(report.pass);
}

TEST_CASE("parametric check: constant probe passes trivially") {
  ParametricProbe probe{[](int) { return Distribution::exponential(2.0); },
                        Distribution::exponential(2.0), 10};
  const auto report = parametric_wset_check(
      {Distribution::exponential(2.0)},
      GaugeSequence::constant(GaugeFunction::power(1.0)), 1, {probe}, 1e-9);
  CHECK(report.pass);
}

TEST_CASE("power-ladder sublevel sets are bounded intervals") {
  // {|x|^{p_{k+1}} <= n |x|^{p_k}} = {|x| <= n^{1/(p_{k+1} - p_k)}}.
  const GaugeSequence seq = GaugeSequence::power_ladder(2.0);
  for (int k = 1; k <= 6; ++k) {
    const double pk = 2.0 * k / (k + 1.0);
    const double pk1 = 2.0 * (k + 1) / (k + 2.0);
    for (double n : {1.0, 2.0, 10.0}) {
      const double bound = std::pow(n, 1.0 / (pk1 - pk));
      CHECK(std::isfinite(bound));
      const GaugeFunction lo = seq.at(k);
      const GaugeFunction hi = seq.at(k + 1);
      for (double x : {bound * 1.01, bound * 2.0, bound * 10.0}) {
        CHECK(hi(x) > n * lo(x));
      }
      for (double x : {bound * 0.99, bound * 0.5, bound * 0.1}) {
        CHECK(hi(x) <= n * lo(x) * (1.0 + 1e-12));
      }
    }
  }
}
