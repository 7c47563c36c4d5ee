#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "degmix/analysis.hpp"
#include "degmix/config.hpp"

namespace degmix {

enum ExitCode : int { kExitPass = 0, kExitRateFailure = 1, kExitUsage = 2, kExitSolver = 3 };

struct RunOptions {
  int jobs = 1;
  int vtk_every = 0;  // 0 disables snapshots
  std::optional<std::string> out_dir;  // overrides the config
};

/// Everything one refinement level produces.
struct LevelRun {
  LevelResult result;
  TimeSeriesSolution solution;
  std::shared_ptr<const OperatorSet> ops;
};

/// Builds, solves and measures level `level` of the study.
LevelRun run_level(const ExperimentConfig& config, int level);

struct ExperimentResult {
  ConvergenceReport report;
  int exit_code = kExitPass;
  std::vector<std::string> warnings;
  std::string error;
};

/// Runs the study and writes rates.csv, errors_raw.csv and summary.json to
/// the output directory. Nothing is written on a solver failure.
ExperimentResult run_experiment(const ExperimentConfig& config, const RunOptions& options = {});

void write_rates_csv(std::ostream& out, const ConvergenceReport& report);
void write_raw_csv(std::ostream& out, const ConvergenceReport& report);

/// Command-line entry point: `run <config> [--jobs k] [--vtk-every m] [--out dir]`.
int cli_main(int argc, char** argv);

}  // namespace degmix
