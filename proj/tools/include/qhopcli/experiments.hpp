#pragma once

#include <string>
#include <vector>

#include "qhopcli/config.hpp"

namespace qhopcli {

struct RunResult {
    int exit_code = 0;
    std::vector<std::string> files;  // artifacts written, relative to out_dir
    std::string message;             // one-line human summary
};

/// Exit codes shared by the CLI: 0 success, 2 config error, 3 numerical
/// divergence in an experiment that asserts a conserved quantity.
inline constexpr int exit_ok = 0;
inline constexpr int exit_config = 2;
inline constexpr int exit_diverged = 3;

/// Runs the experiment named in the config and writes its artifacts plus a
/// manifest into out_dir.  Outputs are a pure function of (config, seed):
/// identical inputs give byte-identical files.
RunResult run_experiment(const ExperimentConfig& cfg, const std::string& out_dir, int threads);

/// Convergence ladder for the experiments that support one
/// (scalar-continuum, stencil-order, metric-conservation), halving
/// study.parameter per level.
RunResult run_convergence(const ExperimentConfig& cfg, const std::string& out_dir, int threads);

/// The standalone symmetry report (also reachable as experiment
/// "symmetry-report" through run_experiment).
RunResult run_symmetry_report(const std::string& out_dir);

/// Richardson-style order estimates between consecutive error levels under
/// parameter halving: order[i] = log2(err[i] / err[i+1]).  A non-monotone
/// or non-positive pair yields NaN and sets *warned.
std::vector<double> orders_from_errors(const std::vector<double>& errors, bool* warned = nullptr);

}  // namespace qhopcli
