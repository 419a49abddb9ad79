#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "support/oracles.hpp"
#include "wsetlab/errors.hpp"
#include "wsetlab/metrics.hpp"

using namespace wsetlab;
using test_oracles::prohorov_bruteforce;
using test_oracles::random_dyadic_measure;

TEST_CASE("levy hand values") {
  const MetricReport zero =
      levy_distance(Distribution::exponential(1.0), Distribution::exponential(1.0));
  CHECK(zero.value <= zero.error_bound);

  for (double c : {0.125, 0.25, 0.5, 0.75}) {
    const MetricReport r =
        levy_distance(Distribution::dirac(0.0), Distribution::dirac(c));
    CHECK(std::abs(r.value - c) <= r.error_bound);
  }
  const MetricReport far =
      levy_distance(Distribution::dirac(0.0), Distribution::dirac(2.0));
  CHECK(std::abs(far.value - 1.0) <= far.error_bound);
}

TEST_CASE("levy is symmetric and satisfies the triangle inequality") {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const Distribution a = random_dyadic_measure(11, 3 * s);
    const Distribution b = random_dyadic_measure(11, 3 * s + 1);
    const Distribution c = random_dyadic_measure(11, 3 * s + 2);
    const double ab = levy_distance(a, b).value;
    const double ba = levy_distance(b, a).value;
    const double ac = levy_distance(a, c).value;
    const double cb = levy_distance(c, b).value;
    CHECK(std::abs(ab - ba) <= 3e-9);
    CHECK(ab <= ac + cb + 1e-8);
  }
}

TEST_CASE("prohorov hand values") {
  const Distribution two = Distribution::empirical({0.0, 1.0}, {0.5, 0.5});
  CHECK(prohorov_distance_finite(two, two).value == 0.0);
  CHECK(prohorov_distance_finite(two, Distribution::dirac(0.0)).value == 0.5);
  CHECK(prohorov_distance_finite(Distribution::dirac(1.0),
                                 Distribution::dirac(11.0))
            .value == 1.0);
  CHECK(prohorov_distance_finite(Distribution::dirac(0.0),
                                 Distribution::dirac(0.25))
            .value == 0.25);
}

TEST_CASE("prohorov equals subset-enumeration brute force exactly") {
  for (std::uint64_t s = 0; s < 200; ++s) {
    const Distribution a = random_dyadic_measure(5, 2 * s);
    const Distribution b = random_dyadic_measure(5, 2 * s + 1);
    const double fast = prohorov_distance_finite(a, b).value;
    const double slow = prohorov_bruteforce(a, b);
    CHECK(fast == slow);
  }
}

TEST_CASE("prohorov axioms and bounds on random pairs") {
  for (std::uint64_t s = 0; s < 60; ++s) {
    const Distribution a = random_dyadic_measure(9, 3 * s);
    const Distribution b = random_dyadic_measure(9, 3 * s + 1);
    const Distribution c = random_dyadic_measure(9, 3 * s + 2);
    const double ab = prohorov_distance_finite(a, b).value;
    const double ba = prohorov_distance_finite(b, a).value;
    CHECK(ab == ba);  // the flow instance is symmetric
    CHECK(ab >= 0.0);
    CHECK(ab <= 1.0);
    const double ac = prohorov_distance_finite(a, c).value;
    const double cb = prohorov_distance_finite(c, b).value;
    CHECK(ab <= ac + cb + 1e-12);
    // Levy is a lower bound on the line.
    const MetricReport levy = levy_distance(a, b);
    CHECK(ab >= levy.value - levy.error_bound - 1e-12);
    // Total variation is an upper bound.
    CHECK(ab <= total_variation_finite(a, b) + 1e-12);
  }
}

TEST_CASE("prohorov rejects oversized supports") {
  std::vector<double> xs(64);
  for (std::size_t i = 0; i < xs.size(); ++i)
    xs[i] = static_cast<double>(i);
  const Distribution big = Distribution::from_sample(xs);
  CHECK_THROWS_AS(prohorov_distance_finite(big, big, 32), Error);
}

TEST_CASE("psi metric hand case: paired diracs with first-moment gauge") {
  const GaugeSequence seq = GaugeSequence::constant(GaugeFunction::power(1.0));
  const MetricReport r = psi_metric(Distribution::dirac(0.0),
                                    Distribution::dirac(1.0), seq, 1);
  CHECK(std::abs(r.value - 1.5) <= r.error_bound + 1e-9);

  const MetricReport same = psi_metric(Distribution::dirac(0.0),
                                       Distribution::dirac(0.0), seq, 1);
  CHECK(same.value <= same.error_bound);
  CHECK(same.error_bound >= 0.5);  // truncation tail 2^{-1}
}

TEST_CASE("psi metric vanishes along a moment-converging sequence") {
  const GaugeSequence seq = GaugeSequence::constant(GaugeFunction::power(1.0));
  const Distribution limit = Distribution::exponential(1.0);
  double prev = 2.0;
  for (int n : {1, 4, 16, 64, 256}) {
    const Distribution mu =
        Distribution::exponential(1.0 + 1.0 / static_cast<double>(n));
    const double v = psi_metric(mu, limit, seq, 8).value;
    CHECK(v < prev + 1e-6);
    prev = v;
  }
  CHECK(prev < 0.02);
}

TEST_CASE("psi metric detects the escaping point-mass sequence") {
  const GaugeSequence seq = GaugeSequence::constant(GaugeFunction::power(1.0));
  const Distribution limit = Distribution::dirac(0.0);
  for (int n : {10, 100, 1000}) {
    const double nd = static_cast<double>(n);
    const Distribution mu = Distribution::empirical_counts(
        {0.0, nd}, {nd - 1.0, 1.0}, nd);
    const MetricReport levy = levy_distance(mu, limit);
    CHECK(levy.value <= 1.0 / nd + levy.error_bound);
    const double v = psi_metric(mu, limit, seq, 8).value;
    CHECK(v >= 0.5);  // gauge gap is exactly one at every n
  }
}

TEST_CASE("psi metric reports the offending gauge index on divergence") {
  const GaugeSequence seq = GaugeSequence::constant(GaugeFunction::power(3.0));
  try {
    psi_metric(Distribution::pareto(2.0, 1.0), Distribution::dirac(0.0), seq,
               2);
    FAIL("expected OutsideDomain");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::OutsideDomain);
    CHECK(std::string(e.what()).find("k=1") != std::string::npos);
  }
}

TEST_CASE("levy between base and slightly contaminated exponential is small") {
  const Distribution base = Distribution::exponential(1.0);
  const Distribution contaminated = Distribution::mixture(
      {{0.99, base}, {0.01, Distribution::dirac(1000.0)}});
  const MetricReport r = levy_distance(base, contaminated);
  CHECK(r.value <= 0.02);
  CHECK(r.value >= 0.005);
}
