#include "wsetlab/robustness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "wsetlab/errors.hpp"
#include "wsetlab/metrics.hpp"
#include "wsetlab/parallel.hpp"

namespace wsetlab {

const char* const kPathEvidenceNote =
    "profile certifies behavior along explicit contamination paths: "
    "non-robustness conclusively, robustness as evidence only";

DataSource distribution_source(Distribution d) {
  return [d = std::move(d)](std::uint64_t seed, std::uint64_t stream,
                            std::size_t n) {
    return SampleStream{seed, stream, d}.sample(n);
  };
}

namespace {

constexpr double nan_marker = std::numeric_limits<double>::quiet_NaN();

struct ReplicationValues {
  std::vector<double> values;  // NaN where the replication failed
  std::size_t failures = 0;
};

ReplicationValues estimator_values(const StatisticalFunctional& T,
                                   const DataSource& source, std::size_t n,
                                   std::size_t R, std::uint64_t seed,
                                   int threads) {
  ReplicationValues out;
  out.values.assign(R, nan_marker);
  par::parallel_for(
      R,
      [&](std::size_t r) {
        const std::vector<double> xs = source(seed, r, n);
        try {
          out.values[r] = plug_in(T, xs);
        } catch (const Error&) {
          // leave the NaN marker; counted below
        }
      },
      threads);
  for (double v : out.values)
    if (std::isnan(v)) ++out.failures;
  if (out.failures * 100 > R)
    fail(ErrorCode::OutsideDomain,
         "estimator failed on " + std::to_string(out.failures) + " of " +
             std::to_string(R) + " replications");
  return out;
}

Distribution law_of(const std::vector<double>& values) {
  std::vector<double> ok;
  ok.reserve(values.size());
  for (double v : values)
    if (!std::isnan(v)) ok.push_back(v);
  return Distribution::from_sample(ok);
}

// Leave-one-block-out jackknife over paired replication blocks.
double jackknife_se(const std::vector<double>& base,
                    const std::vector<double>& contaminated,
                    std::size_t blocks) {
  const std::size_t R = base.size();
  blocks = std::min(blocks, R);
  if (blocks < 2) return 0.0;
  std::vector<double> leave_out(blocks);
  for (std::size_t b = 0; b < blocks; ++b) {
    std::vector<double> xb, yb;
    xb.reserve(R);
    yb.reserve(R);
    const std::size_t lo = b * R / blocks;
    const std::size_t hi = (b + 1) * R / blocks;
    for (std::size_t r = 0; r < R; ++r) {
      if (r >= lo && r < hi) continue;
      if (!std::isnan(base[r])) xb.push_back(base[r]);
      if (!std::isnan(contaminated[r])) yb.push_back(contaminated[r]);
    }
    leave_out[b] = prohorov_distance_finite(Distribution::from_sample(xb),
                                            Distribution::from_sample(yb))
                       .value;
  }
  double mean = 0.0;
  for (double v : leave_out) mean += v;
  mean /= static_cast<double>(blocks);
  double ss = 0.0;
  for (double v : leave_out) ss += (v - mean) * (v - mean);
  const double bd = static_cast<double>(blocks);
  return std::sqrt((bd - 1.0) / bd * ss);
}

}  // namespace

EstimatorLaw estimator_law(const StatisticalFunctional& T,
                           const DataSource& source, std::size_t n,
                           std::size_t R, std::uint64_t seed, int threads) {
  if (n == 0 || R == 0)
    fail(ErrorCode::DomainError, "need n >= 1 and R >= 1");
  const ReplicationValues rv =
      estimator_values(T, source, n, R, seed, threads);
  EstimatorLaw out{law_of(rv.values), R - rv.failures, rv.failures};
  return out;
}

ContaminationPath ContaminationPath::within_family(
    std::function<Distribution(double)> curve, std::vector<double> t_grid) {
  ContaminationPath p;
  p.kind_ = Kind::WithinFamily;
  p.curve_ = std::move(curve);
  p.t_grid_ = std::move(t_grid);
  return p;
}

ContaminationPath ContaminationPath::point_mass(Distribution base, double c,
                                                std::vector<double> t_grid) {
  ContaminationPath p;
  p.kind_ = Kind::PointMass;
  p.curve_ = [base = std::move(base), c](double t) {
    if (t == 0.0) return base;
    return Distribution::mixture(
        {{1.0 - t, base}, {t, Distribution::dirac(c)}});
  };
  p.t_grid_ = std::move(t_grid);
  return p;
}

ContaminationPath ContaminationPath::general_mixture(
    Distribution base, Distribution contaminant, std::vector<double> t_grid) {
  ContaminationPath p;
  p.kind_ = Kind::GeneralMixture;
  p.curve_ = [base = std::move(base),
              contaminant = std::move(contaminant)](double t) {
    if (t == 0.0) return base;
    return Distribution::mixture({{1.0 - t, base}, {t, contaminant}});
  };
  p.t_grid_ = std::move(t_grid);
  return p;
}

Distribution ContaminationPath::at(double t) const {
  if (!(t >= 0.0 && t <= 1.0))
    fail(ErrorCode::DomainError, "path parameter must lie in [0,1]");
  return curve_(t);
}

RobustnessProfile robustness_profile_sources(
    const StatisticalFunctional& T, const DataSource& base,
    const std::function<DataSource(double)>& contaminated,
    const std::vector<double>& t_grid,
    const std::vector<std::size_t>& n_grid, std::size_t R,
    std::uint64_t seed, int threads) {
  if (t_grid.empty() || n_grid.empty())
    fail(ErrorCode::DomainError, "empty grid");
  RobustnessProfile profile;
  profile.note = kPathEvidenceNote;
  for (double t : t_grid) {
    const DataSource path_source = contaminated(t);
    double sup = 0.0;
    for (std::size_t n : n_grid) {
      // Paired seeds: both runs consume identical uniforms.
      const ReplicationValues vb =
          estimator_values(T, base, n, R, seed, threads);
      const ReplicationValues vc =
          estimator_values(T, path_source, n, R, seed, threads);
      ProfileRow row;
      row.n = n;
      row.t = t;
      row.R = R;
      row.failures = vb.failures + vc.failures;
      row.pi_hat =
          prohorov_distance_finite(law_of(vb.values), law_of(vc.values))
              .value;
      row.mc_se = jackknife_se(vb.values, vc.values, 20);
      sup = std::max(sup, row.pi_hat);
      profile.rows.push_back(row);
    }
    profile.sup_over_n.emplace_back(t, sup);
  }
  return profile;
}

RobustnessProfile robustness_profile(const StatisticalFunctional& T,
                                     const Distribution& base,
                                     const ContaminationPath& path,
                                     const std::vector<std::size_t>& n_grid,
                                     std::size_t R, std::uint64_t seed,
                                     int threads) {
  return robustness_profile_sources(
      T, distribution_source(base),
      [&path](double t) { return distribution_source(path.at(t)); },
      path.t_grid(), n_grid, R, seed, threads);
}

BreakdownReport breakdown_demo_mean(const std::vector<int>& n_values) {
  BreakdownReport report;
  const Distribution limit = Distribution::dirac(0.0);
  const StatisticalFunctional mean = StatisticalFunctional::mean();
  for (int n : n_values) {
    if (n < 2) fail(ErrorCode::DomainError, "need n >= 2");
    std::vector<double> xs(static_cast<std::size_t>(n), 0.0);
    xs[0] = static_cast<double>(n);
    BreakdownRow row;
    row.n = n;
    row.levy_to_limit =
        levy_distance(Distribution::from_sample(xs), limit).value;
    row.mean_value = plug_in(mean, xs);
    report.max_mean_gap =
        std::max(report.max_mean_gap, std::abs(row.mean_value - 1.0));
    report.rows.push_back(row);
  }
  return report;
}

}  // namespace wsetlab
