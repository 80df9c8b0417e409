// Copyright 2026 The ONRAP Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// onrap: Monte-Carlo runs, trace replay and parameter checks.

#include <cstdint>
#include <iostream>
#include <string>

#if __has_include(<CLI/CLI.hpp>)
#include <CLI/CLI.hpp>
#else
#include "CLI11.hpp"  // single-header distribution
#endif
#include "commands.h"

int main(int argc, char** argv) {
  namespace cli = onrap::cli;
  CLI::App app{"Occupancy-based navigation with risk-aware planning"};
  app.require_subcommand(1);
  const auto on_off = CLI::IsMember({"on", "off"});

  cli::RunArgs run;
  CLI::App* run_cmd = app.add_subcommand(
      "run", "Run episodes for each planner and write metrics and plots");
  run_cmd->add_option("--config", run.config_path, "Scenario config file")
      ->check(CLI::ExistingFile);
  run_cmd->add_option("--out", run.out_dir, "Output directory")
      ->capture_default_str();
  run_cmd->add_option("--episodes", run.episodes, "Number of episodes");
  run_cmd->add_option("--planners", run.planners,
                      "Comma-separated list of onrap, astar, rrtstar");
  run_cmd->add_option("--seed", run.seed, "Global seed");
  run_cmd->add_option("--flow", run.flow, "Occupancy flow prediction")
      ->check(on_off);
  run_cmd->add_option("--plots", run.plots, "Write SVG plots")
      ->check(on_off);
  run_cmd->add_option("--timing", run.timing,
                      "Measure solve times (off: runtime columns are NA)")
      ->check(on_off);
  run_cmd->add_option("--traces", run.traces,
                      "Write trace files for the first N episodes");
  run_cmd->add_flag("--grids", run.grids,
                    "Write a grid snapshot per cycle of traced episodes");
  run_cmd->add_flag("--diagnostics", run.diagnostics,
                    "Write solver iteration CSVs for traced ONRAP episodes");
  run_cmd->add_flag("--quiet", run.quiet, "No per-episode progress");

  cli::ReplayArgs replay;
  CLI::App* replay_cmd = app.add_subcommand(
      "replay", "Plot a trace written by run (overlay and histograms)");
  replay_cmd->add_option("trace", replay.trace_path, "*.trace.csv file")
      ->required()
      ->check(CLI::ExistingFile);
  replay_cmd->add_option("--out", replay.out_dir,
                         "Plot directory (default: next to the trace)");
  replay_cmd->add_option("--plots", replay.plots, "Write SVG plots")
      ->check(on_off)
      ->capture_default_str();

  cli::ValidateArgs validate;
  CLI::App* validate_cmd = app.add_subcommand(
      "validate-params", "Check planner parameters for consistency");
  validate_cmd->add_option("--config", validate.config_path,
                           "Scenario config file")
      ->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cli::kExitConfigError;
  }

  if (*run_cmd) return cli::Run(run, std::cout, std::cerr);
  if (*replay_cmd) return cli::Replay(replay, std::cout, std::cerr);
  return cli::ValidateParams(validate, std::cout, std::cerr);
}
