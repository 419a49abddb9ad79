#ifndef WSETLAB_CONFIG_HPP
#define WSETLAB_CONFIG_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "wsetlab/distribution.hpp"
#include "wsetlab/frechet.hpp"
#include "wsetlab/functionals.hpp"
#include "wsetlab/gauge.hpp"
#include "wsetlab/risk.hpp"

namespace wsetlab {
namespace cli {

// Exit codes of the experiment runner.
inline constexpr int kExitOk = 0;
inline constexpr int kExitAssertionFailed = 1;
inline constexpr int kExitSchema = 2;
inline constexpr int kExitRuntime = 3;

/// Strict parsers for the config literals; unknown fields are rejected
/// with a BadConfig error naming the offender.
Distribution parse_distribution(const nlohmann::json& j);
YoungFunction parse_young(const nlohmann::json& j);
GaugeFunction parse_gauge(const nlohmann::json& j);
GaugeSequence parse_gauge_sequence(const nlohmann::json& j);
RiskFunctionalSpec parse_risk_spec(const nlohmann::json& j);
StatisticalFunctional parse_functional(const nlohmann::json& j);
FrechetSpec::Coupling parse_coupling(const nlohmann::json& j);
AggregationMap parse_aggregation_map(const nlohmann::json& j);

/// One-column CSV of observations (header optional).
std::vector<double> read_sample_csv(const std::string& path);

struct RunOutcome {
  int exit_code = kExitOk;
  nlohmann::json summary;             // the result document
  std::vector<std::string> written;   // artifact paths
  std::string message;                // diagnostics on failure
};

/// Validates and runs one experiment config; writes declared artifacts
/// under out_dir and evaluates the config's assertions against the
/// summary document. Relative data paths resolve against base_dir.
RunOutcome run_config(const nlohmann::json& config, const std::string& out_dir,
                      std::optional<std::uint64_t> seed_override, int threads,
                      const std::string& base_dir = ".");

RunOutcome run_config_file(const std::string& path, const std::string& out_dir,
                           std::optional<std::uint64_t> seed_override,
                           int threads);

/// The shipped experiment manifest (file names under configs/).
const std::vector<std::string>& shipped_config_names();

/// Runs every shipped config; exit 0 iff all pass.
RunOutcome run_reproduce_all(const std::string& config_dir,
                             const std::string& out_dir, int threads);

/// Shortest-round-trip decimal formatting used for every artifact.
std::string format_double(double v);

}  // namespace cli
}  // namespace wsetlab

#endif
