#ifndef WSETLAB_ROBUSTNESS_HPP
#define WSETLAB_ROBUSTNESS_HPP

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "wsetlab/distribution.hpp"
#include "wsetlab/functionals.hpp"

namespace wsetlab {

// Every profile header carries this caveat: behavior is certified along
// explicit contamination paths, which witnesses non-robustness
// conclusively but robustness only as evidence.
extern const char* const kPathEvidenceNote;

/// Source of i.i.d. scalar observations, reproducible per
/// (seed, stream, n). Replication r of an experiment uses stream r.
using DataSource =
    std::function<std::vector<double>(std::uint64_t, std::uint64_t,
                                      std::size_t)>;

DataSource distribution_source(Distribution d);

struct EstimatorLaw {
  Distribution law;          // finite-support law of the estimator
  std::size_t replications;  // successful replications in the law
  std::size_t failures;      // domain errors, counted not dropped silently
};

/// Law of the plug-in estimate at sample size n across R replications.
/// Aborts (OutsideDomain) when more than 1% of replications fail.
EstimatorLaw estimator_law(const StatisticalFunctional& T,
                           const DataSource& source, std::size_t n,
                           std::size_t R, std::uint64_t seed,
                           int threads = 0);

class ContaminationPath {
 public:
  enum class Kind { WithinFamily, PointMass, GeneralMixture };

  static ContaminationPath within_family(
      std::function<Distribution(double)> curve, std::vector<double> t_grid);
  static ContaminationPath point_mass(Distribution base, double c,
                                      std::vector<double> t_grid);
  static ContaminationPath general_mixture(Distribution base,
                                           Distribution contaminant,
                                           std::vector<double> t_grid);

  /// t = 0 reproduces the base distribution exactly.
  Distribution at(double t) const;
  Kind kind() const { return kind_; }
  const std::vector<double>& t_grid() const { return t_grid_; }

 private:
  ContaminationPath() = default;
  Kind kind_ = Kind::WithinFamily;
  std::function<Distribution(double)> curve_;
  std::vector<double> t_grid_;
};

struct ProfileRow {
  std::size_t n = 0;
  double t = 0.0;
  double pi_hat = 0.0;  // estimated Prohorov distance between the laws
  double mc_se = 0.0;   // replication-block jackknife standard error
  std::size_t R = 0;
  std::size_t failures = 0;
};

struct RobustnessProfile {
  std::vector<ProfileRow> rows;
  // per t: sup over the n-grid of pi_hat
  std::vector<std::pair<double, double>> sup_over_n;
  std::string note;
};

/// Monte Carlo profile: paired seeds across base/contaminated runs, the
/// exact finite-support Prohorov distance between estimator laws, and a
/// 20-block jackknife error estimate.
RobustnessProfile robustness_profile(const StatisticalFunctional& T,
                                     const Distribution& base,
                                     const ContaminationPath& path,
                                     const std::vector<std::size_t>& n_grid,
                                     std::size_t R, std::uint64_t seed,
                                     int threads = 0);

/// Same engine over abstract data sources indexed by the contamination
/// parameter; used for dependence-uncertainty (coupling) sweeps where the
/// observations are not draws of a closed-form law.
RobustnessProfile robustness_profile_sources(
    const StatisticalFunctional& T, const DataSource& base,
    const std::function<DataSource(double)>& contaminated,
    const std::vector<double>& t_grid,
    const std::vector<std::size_t>& n_grid, std::size_t R,
    std::uint64_t seed, int threads = 0);

struct BreakdownRow {
  int n = 0;
  double levy_to_limit = 0.0;  // distance of the sample law to the point mass
  double mean_value = 0.0;     // plug-in mean, exactly one by construction
};

struct BreakdownReport {
  std::vector<BreakdownRow> rows;
  double max_mean_gap = 0.0;  // max |mean - 1| over the table
};

/// The escaping-mass construction: one observation at n, the rest at
/// zero. The sample laws collapse weakly to the point mass at zero while
/// the plug-in mean stays pinned at one.
BreakdownReport breakdown_demo_mean(const std::vector<int>& n_values);

}  // namespace wsetlab

#endif
