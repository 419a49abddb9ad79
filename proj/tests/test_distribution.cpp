#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "wsetlab/distribution.hpp"
#include "wsetlab/errors.hpp"
#include "wsetlab/numeric.hpp"

using namespace wsetlab;

namespace {

std::vector<Distribution> analytic_zoo() {
  return {
      Distribution::normal(0.0, 1.0),     Distribution::normal(-1.5, 2.0),
      Distribution::exponential(1.0),     Distribution::exponential(2.0),
      Distribution::gamma(3.0, 2.0),      Distribution::gamma(0.7, 1.0),
      Distribution::pareto(2.0, 1.0),     Distribution::pareto(3.5, 0.5),
      Distribution::gumbel(1.0),          Distribution::gumbel(0.25),
  };
}

}  // namespace

TEST_CASE("cdf hand values") {
  CHECK(Distribution::gumbel(1.0).cdf(0.0) ==
        doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
  CHECK(Distribution::dirac(0.0).cdf(-1.0) == 0.0);
  CHECK(Distribution::dirac(0.0).cdf(0.0) == 1.0);
  const Distribution e = Distribution::empirical({0.0, 1.0}, {0.5, 0.5});
  CHECK(e.cdf(0.0) == 0.5);
  CHECK(e.cdf(0.5) == 0.5);
  CHECK(e.cdf(1.0) == 1.0);
}

TEST_CASE("cdf is monotone with limits 0 and 1") {
  for (const auto& d : analytic_zoo()) {
    double prev = 0.0;
    for (double x = -50.0; x <= 50.0; x += 0.25) {
      const double f = d.cdf(x);
      CHECK(f >= prev - 1e-12);
      CHECK(f >= 0.0);
      CHECK(f <= 1.0);
      prev = std::max(prev, f);
    }
    CHECK(d.cdf(-1e12) <= 1e-9);
    CHECK(d.cdf(1e12) >= 1.0 - 1e-9);
  }
}

TEST_CASE("quantile hand values") {
  CHECK(Distribution::exponential(2.0).quantile(1.0 - std::exp(-1.0)) ==
        doctest::Approx(2.0).epsilon(1e-12));
  CHECK(Distribution::dirac(3.5).quantile(0.2) == 3.5);
  CHECK(Distribution::dirac(3.5).quantile(0.9) == 3.5);
  const Distribution e =
      Distribution::empirical({-2.0, -1.0, 0.0, 1.0}, {0.25, 0.25, 0.25, 0.25});
  CHECK(e.quantile(0.3) == -1.0);
  CHECK(e.quantile(0.25) == -2.0);  // left quantile takes the lowest atom
  CHECK_THROWS_AS(e.quantile(0.0), Error);
  CHECK_THROWS_AS(e.quantile(1.0), Error);
}

TEST_CASE("quantile satisfies the Galois inequality") {
  for (const auto& d : analytic_zoo()) {
    for (double u = 0.02; u < 1.0; u += 0.02) {
      const double q = d.quantile(u);
      CHECK(d.cdf(q) >= u - 1e-9);
      CHECK(d.cdf(q - 1e-6 * (1.0 + std::abs(q))) <= u + 1e-6);
    }
  }
  const Distribution e = Distribution::empirical({0.0, 1.0}, {0.5, 0.5});
  for (double u = 0.05; u < 1.0; u += 0.05) {
    const double q = e.quantile(u);
    CHECK(e.cdf(q) >= u);
    for (double x : {-0.5, 0.0, 0.5, 1.0}) {
      // F^{<-}(u) <= x  iff  u <= F(x)
      CHECK((q <= x) == (u <= e.cdf(x)));
    }
  }
}

TEST_CASE("mixture cdf and quantile agree") {
  const Distribution m = Distribution::mixture(
      {{0.7, Distribution::exponential(1.0)}, {0.3, Distribution::normal(5.0, 0.5)}});
  for (double u = 0.05; u < 1.0; u += 0.05) {
    const double q = m.quantile(u);
    CHECK(m.cdf(q) >= u - 1e-9);
    CHECK(m.cdf(q - 1e-7 * (1 + std::abs(q))) <= u + 1e-7);
  }
}

TEST_CASE("atomic mixtures collapse to empirical") {
  const Distribution m = Distribution::mixture(
      {{0.5, Distribution::dirac(0.0)},
       {0.5, Distribution::empirical({0.0, 1.0}, {0.5, 0.5})}});
  REQUIRE(m.is_atomic());
  CHECK(m.cdf(0.0) == 0.75);
  CHECK(m.cdf(1.0) == 1.0);
}

TEST_CASE("sampling is deterministic and degenerate laws are constant") {
  const SampleStream s{42, 7, Distribution::dirac(5.0)};
  const auto xs = s.sample(3);
  CHECK(xs == std::vector<double>{5.0, 5.0, 5.0});

  const SampleStream a{123, 0, Distribution::exponential(1.0)};
  const SampleStream b{123, 0, Distribution::exponential(1.0)};
  CHECK(a.sample(100) == b.sample(100));
  const SampleStream c{123, 1, Distribution::exponential(1.0)};
  CHECK(a.sample(100) != c.sample(100));
}

TEST_CASE("law of large numbers at 1e5 draws") {
  const SampleStream s{2024, 0, Distribution::exponential(1.0)};
  const auto xs = s.sample(100000);
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  CHECK(std::abs(mean - 1.0) < 0.02);
}

TEST_CASE("inversion sampling matches the analytic cdf (DKW scale)") {
  std::uint64_t stream = 0;
  for (const auto& d : analytic_zoo()) {
    const SampleStream s{77, stream++, d};
    CHECK(kolmogorov_distance(d, s.sample(100000)) < 0.01);
  }
}

TEST_CASE("gauge integrals: closed forms and point evaluation") {
  // First moment of an exponential law is its parameter.
  for (double theta : {0.5, 1.0, 2.0}) {
    const GaugeIntegral gi =
        integrate_gauge(Distribution::exponential(theta), GaugeFunction::power(1.0));
    CHECK_FALSE(gi.diverges);
    CHECK(gi.value == doctest::Approx(theta).epsilon(1e-12));
  }
  // Dirac: point evaluation.
  const GaugeIntegral gd = integrate_gauge(Distribution::dirac(-3.0),
                                           GaugeFunction::power(2.0));
  CHECK(gd.value == doctest::Approx(9.0));
  // Pareto(2,1) has no third moment.
  CHECK(integrate_gauge(Distribution::pareto(2.0, 1.0), GaugeFunction::power(3.0))
            .diverges);
  CHECK_FALSE(
      integrate_gauge(Distribution::pareto(2.0, 1.0), GaugeFunction::power(1.5))
          .diverges);
}

TEST_CASE("gauge integrals: quadrature against known values") {
  // E|X| for standard normal = sqrt(2/pi); closed form path (m=0).
  const double e_abs =
      integrate_gauge(Distribution::normal(0.0, 1.0), GaugeFunction::power(1.0))
          .value;
  CHECK(e_abs == doctest::Approx(std::sqrt(2.0 / std::acos(-1.0))).epsilon(1e-10));
  // Shifted normal goes through quadrature; E|X| for N(1,1).
  const double v = integrate_gauge(Distribution::normal(1.0, 1.0),
                                   GaugeFunction::power(1.0))
                       .value;
  const double phi1 = std::exp(-0.5) / std::sqrt(2.0 * std::acos(-1.0));
  const double expected = 2.0 * phi1 + 1.0 * (2.0 * num::normal_cdf(1.0) - 1.0);
  CHECK(v == doctest::Approx(expected).epsilon(1e-8));
  // Exponential mgf at lambda=0.25, theta=2: closed form 1/(1-0.5)=2.
  const double mgf = integrate_gauge(Distribution::exponential(2.0),
                                     GaugeFunction::exp_power(0.25, 1.0))
                         .value;
  CHECK(mgf == doctest::Approx(2.0).epsilon(1e-10));
  // At lambda = 1/theta the same integral diverges.
  CHECK(integrate_gauge(Distribution::exponential(2.0),
                        GaugeFunction::exp_power(0.5, 1.0))
            .diverges);
  // Gumbel mean via |x| gauge cross-check: E[X] = gamma/a but E|X| > E[X].
  const double gm = integrate_gauge(Distribution::gumbel(1.0),
                                    GaugeFunction::power(1.0))
                        .value;
  CHECK(gm > num::euler_gamma);
  CHECK(Distribution::gumbel(1.0).mean() ==
        doctest::Approx(num::euler_gamma).epsilon(1e-12));
}

TEST_CASE("gauge integral of a mixture is the weighted sum") {
  const Distribution a = Distribution::exponential(1.0);
  const Distribution b = Distribution::gamma(2.0, 0.5);
  const Distribution m = Distribution::mixture({{0.25, a}, {0.75, b}});
  const GaugeFunction g = GaugeFunction::power(2.0);
  const double lhs = integrate_gauge(m, g).value;
  const double rhs =
      0.25 * integrate_gauge(a, g).value + 0.75 * integrate_gauge(b, g).value;
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-9));
}

TEST_CASE("tail gauge integral hand values") {
  // Exponential(1), psi(x)=x, threshold 2: (1+2)e^{-2}.
  const GaugeIntegral t = tail_gauge_integral(
      Distribution::exponential(1.0), GaugeFunction::power(1.0), 2.0);
  CHECK(t.value == doctest::Approx(3.0 * std::exp(-2.0)).epsilon(1e-8));
  // Dirac(0) with psi(0)=0 < a.
  CHECK(tail_gauge_integral(Distribution::dirac(0.0), GaugeFunction::power(1.0),
                            0.5)
            .value == 0.0);
}

TEST_CASE("tail gauge integral is monotone in the threshold") {
  const Distribution zoo[] = {Distribution::exponential(1.0),
                              Distribution::normal(0.0, 1.0),
                              Distribution::gumbel(1.0)};
  const GaugeFunction g = GaugeFunction::power(2.0);
  for (const auto& d : zoo) {
    const double full = integrate_gauge(d, g).value;
    double prev = full + 1e-9;
    for (double a : {0.001, 0.1, 1.0, 4.0, 16.0, 64.0, 256.0}) {
      const double t = tail_gauge_integral(d, g, a).value;
      CHECK(t <= prev + 1e-7);
      CHECK(t >= -1e-12);
      prev = t;
    }
    // a -> 0 recovers the full integral.
    CHECK(tail_gauge_integral(d, g, 1e-12).value ==
          doctest::Approx(full).epsilon(1e-6));
    CHECK(prev < 1e-3);  // tails vanish
  }
}

TEST_CASE("tail of gumbel log-density gauge handles the nonmonotone region") {
  const GaugeFunction g =
      GaugeFunction::abs_log_density(LogDensityModel::Gumbel, 1.0);
  const Distribution d = Distribution::gumbel(1.0);
  const double full = integrate_gauge(d, g).value;
  const double t0 = tail_gauge_integral(d, g, 1e-9).value;
  CHECK(t0 == doctest::Approx(full).epsilon(1e-6));
  double prev = full + 1e-9;
  for (double a : {0.5, 1.0, 2.0, 4.0, 8.0}) {
    const double t = tail_gauge_integral(d, g, a).value;
    CHECK(t <= prev + 1e-8);
    prev = t;
  }
}

TEST_CASE("empirical weights must sum to one and merge duplicates") {
  CHECK_THROWS_AS(Distribution::empirical({0.0, 1.0}, {0.6, 0.6}), Error);
  const Distribution e =
      Distribution::empirical({1.0, 1.0, 0.0}, {0.25, 0.25, 0.5});
  CHECK(e.cdf(0.5) == 0.5);
  CHECK(e.cdf(1.0) == 1.0);
  CHECK(std::get<Distribution::Empirical>(e.form()).atoms.size() == 2);
}

TEST_CASE("sample-born empirical keeps ratio-of-sums exactness") {
  // One observation at n, n-1 at zero: the mean is exactly 1.
  for (int n : {3, 7, 10, 49, 100, 1000}) {
    std::vector<double> xs(static_cast<std::size_t>(n), 0.0);
    xs[0] = static_cast<double>(n);
    const Distribution e = Distribution::from_sample(xs);
    CHECK(e.mean() == 1.0);
    CHECK(integrate_gauge(e, GaugeFunction::power(1.0)).value == 1.0);
  }
}
