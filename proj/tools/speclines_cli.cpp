#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "speclines/config.hpp"
#include "speclines/errors.hpp"
#include "speclines/harness.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  int workers = 1;
};

void add_common(CLI::App* cmd, Options& opts) {
  cmd->add_option("--config", opts.config, "Scenario config (INI)")->required();
  cmd->add_option("--seed", opts.seed, "Master seed (overrides the config)");
  cmd->add_option("--out", opts.out, "Output CSV path; summaries are written next to it")
      ->required();
  cmd->add_option("--workers", opts.workers, "Worker threads")->check(CLI::Range(1, 1024));
}

int run(const std::string& command, const Options& opts) {
  using speclines::ScenarioKind;
  speclines::ScenarioConfig config = speclines::load_config(opts.config);
  if (opts.seed) config.seed = *opts.seed;
  const ScenarioKind expected = command == "estimate"      ? ScenarioKind::EstimationSweep
                                : command == "regret"      ? ScenarioKind::Regret
                                : command == "lower-bound" ? ScenarioKind::LowerBoundProbe
                                                           : ScenarioKind::ActuatorDemo;
  if (config.kind != expected) {
    throw speclines::ConfigError(std::string("[scenario] kind: '") + to_string(config.kind) +
                                 "' cannot be run by '" + command + "'");
  }
  speclines::write_tables(opts.out, speclines::run_scenario(config, opts.workers));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral-line excitation experiments"};
  app.require_subcommand(1);
  Options opts;
  for (const char* name : {"estimate", "regret", "lower-bound", "actuator"}) {
    add_common(app.add_subcommand(name, std::string("Run the ") + name + " scenario"), opts);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    return run(command, opts);
  } catch (const speclines::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const speclines::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
