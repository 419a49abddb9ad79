#ifndef WSETLAB_INTEGRABILITY_HPP
#define WSETLAB_INTEGRABILITY_HPP

#include <functional>
#include <string>
#include <vector>

#include "wsetlab/distribution.hpp"
#include "wsetlab/gauge.hpp"

namespace wsetlab {

// Every report carries this disclaimer: only finite families and explicit
// sequences are checked, so a passing verdict is evidence for the
// neighborhood-version property, while a failing one is conclusive.
extern const char* const kFiniteSurrogateNote;

struct UniformIntegrabilityEntry {
  int k = 0;
  double epsilon = 0.0;
  double threshold = 0.0;     // least grid a with sup tail <= epsilon
  double achieved_sup = 0.0;  // sup of tails at that threshold
  bool found = false;
  int witness = -1;  // index of the violating family member when !found
};

struct UniformIntegrabilityReport {
  std::vector<UniformIntegrabilityEntry> per_k;
  bool pass = false;
  std::size_t family_size = 0;
  std::string note;
};

struct SequenceConvergenceReport {
  std::vector<int> n_values;
  std::vector<double> levy_gaps;
  // gauge_gaps[k-1][i] = |int psi_k dmu_{n_i} - int psi_k dmu_0|
  std::vector<std::vector<double>> gauge_gaps;
  double tol = 0.0;
  bool pass = false;
  int failing_k = 0;  // 0 = levy gap failed, -1 = none
  std::string note;
};

struct ParametricWsetReport {
  std::vector<SequenceConvergenceReport> probe_reports;
  double min_pairwise_levy = 0.0;
  double injectivity_floor = 0.0;
  bool injectivity_ok = false;
  bool pass = false;
  std::string note;
};

/// Least threshold a on the geometric grid {2^{j/4} : j = 0..120} with
/// sup over the family of int psi_k 1{psi_k >= a} <= epsilon, per k.
UniformIntegrabilityReport uniform_integrating_check(
    const std::vector<Distribution>& family, const GaugeSequence& seq,
    int depth, double epsilon);

/// Tabulates Levy and gauge-integral gaps of mu_n against the limit for
/// n = 1..n_max; passes when every final gap is <= tol.
SequenceConvergenceReport sequence_condition_e(
    const std::function<Distribution(int)>& family, const Distribution& limit,
    const GaugeSequence& gauges, int depth, int n_max, double tol);

struct ParametricProbe {
  std::function<Distribution(int)> family;  // n >= 1
  Distribution limit;
  int n_max = 100;
};

/// Runs the condition-(e) tabulation along each probe and checks the
/// injectivity surrogate: distinct grid members stay Levy-separated.
ParametricWsetReport parametric_wset_check(
    const std::vector<Distribution>& grid, const GaugeSequence& gauges,
    int depth, const std::vector<ParametricProbe>& probes, double tol,
    double injectivity_floor = 1e-4);

}  // namespace wsetlab

#endif
