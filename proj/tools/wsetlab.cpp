// Experiment driver: validates a JSON config, runs the requested
// subcommand, writes CSV/JSON artifacts, and checks the config's
// assertions. Logs go to stderr only; artifacts never interleave logs.
#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "wsetlab/config.hpp"
#include "wsetlab/parallel.hpp"

namespace {

struct CommonArgs {
  std::string config_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("config", args.config_path, "experiment config (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--out", args.out_dir, "artifact directory");
  cmd->add_option("--seed", args.seed, "override the config seed");
}

int run_one(const std::string& expected_command, const CommonArgs& args) {
  const wsetlab::cli::RunOutcome outcome = wsetlab::cli::run_config_file(
      args.config_path, args.out_dir, args.seed, wsetlab::par::max_threads());
  if (!outcome.summary.is_null() &&
      outcome.summary.value("command", "") != expected_command &&
      outcome.exit_code == wsetlab::cli::kExitOk) {
    std::cerr << "config command does not match the subcommand\n";
    return wsetlab::cli::kExitSchema;
  }
  if (!outcome.message.empty()) std::cerr << outcome.message << '\n';
  if (outcome.exit_code == wsetlab::cli::kExitOk &&
      !outcome.summary.is_null())
    std::cout << outcome.summary.dump(2) << '\n';
  return outcome.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gauge-topology robustness laboratory"};
  app.require_subcommand(1);

  const char* names[] = {"metric", "wset-check", "eval",      "risk",
                         "sdwn",   "aggregate",  "robustness"};
  CommonArgs args[7];
  for (int i = 0; i < 7; ++i) {
    CLI::App* cmd = app.add_subcommand(names[i]);
    add_common(cmd, args[i]);
  }

  std::string configs_dir = "configs";
  std::string reproduce_out = "reproduce-out";
  CLI::App* reproduce = app.add_subcommand(
      "reproduce-all", "run every shipped experiment config");
  reproduce->add_option("--configs", configs_dir, "shipped config directory");
  reproduce->add_option("--out", reproduce_out, "artifact directory");

  CLI11_PARSE(app, argc, argv);

  for (int i = 0; i < 7; ++i) {
    if (app.got_subcommand(names[i])) return run_one(names[i], args[i]);
  }
  if (app.got_subcommand("reproduce-all")) {
    const wsetlab::cli::RunOutcome outcome = wsetlab::cli::run_reproduce_all(
        configs_dir, reproduce_out, wsetlab::par::max_threads());
    if (!outcome.message.empty()) std::cerr << outcome.message << '\n';
    std::cout << outcome.summary.dump(2) << '\n';
    return outcome.exit_code;
  }
  return wsetlab::cli::kExitSchema;
}
