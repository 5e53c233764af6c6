#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "pcosync/commands.hpp"

int main(int argc, char** argv) {
  using namespace pcosync;
  CLI::App app{"Pulse-coupled oscillator synchronization simulator"};
  app.require_subcommand(1);

  CommandOptions opt;
  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", opt.config_path, "Scenario (or sweep) JSON file")->required();
    cmd->add_option("--format", opt.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
  };

  auto* validate = app.add_subcommand("validate", "Check the synchronization conditions of a scenario");
  add_common(validate);

  auto* run = app.add_subcommand("run", "Simulate one scenario and write its traces");
  add_common(run);
  run->add_option("--seed", opt.seed, "Override the scenario seed");
  run->add_option("--horizon", opt.horizon, "Override the horizon, in ticks");
  run->add_option("--out-dir", opt.out_dir, "Directory for events.jsonl, phases.csv, summary.json");

  auto* sweep = app.add_subcommand("sweep", "Run seeded Monte-Carlo repetitions of a scenario");
  add_common(sweep);
  sweep->add_option("--seed", opt.seed, "First seed; run k uses seed + k");
  sweep->add_option("--horizon", opt.horizon, "Override the horizon, in ticks");
  sweep->add_option("--runs", opt.runs, "Number of runs");
  sweep->add_option("--workers", opt.workers, "Worker threads (0 = all cores)");
  sweep->add_option("--out-dir", opt.out_dir, "Directory for aggregate.json");

  auto* topology = app.add_subcommand("topology", "Print degrees and adjacency of a topology");
  add_common(topology);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  if (*validate) return cmd_validate(opt, std::cout, std::cerr);
  if (*run) return cmd_run(opt, std::cout, std::cerr);
  if (*sweep) return cmd_sweep(opt, std::cout, std::cerr);
  return cmd_topology(opt, std::cout, std::cerr);
}
