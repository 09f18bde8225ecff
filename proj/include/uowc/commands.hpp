#pragma once

#include <filesystem>
#include <functional>
#include <ostream>
#include <vector>

#include "uowc/config.hpp"

namespace uowc {

/// Process exit codes of the command-line front end.
enum ExitCode : int {
    kExitOk = 0,
    kExitConfig = 2,
    kExitMissingArtifact = 3,
    kExitNumerical = 4,
};

/// Runs `body`, reporting exceptions on `err` and mapping them to an exit code.
[[nodiscard]] int run_guarded(const std::function<void()>& body, std::ostream& err);

/// Writes the dataset CSV; returns its path.
std::filesystem::path cmd_generate(const RunConfig& cfg, std::ostream& out);

/// Trains from the dataset file; writes checkpoints and `training_log.csv`.
TrainedMaps cmd_train(const RunConfig& cfg, std::ostream& out);

struct EvaluateOutput {
    std::vector<ScenarioResult> results;
    std::vector<SweepRow> summary;
    std::vector<ContractionDiagnostic> contraction;
};

/// Writes `trace_<name>.csv` per scenario, `summary.csv`, `observer_modes.csv`
/// and `contraction.csv` into the output directory.
EvaluateOutput cmd_evaluate(const RunConfig& cfg, std::ostream& out);

/// Writes `sweep.csv`.
std::vector<SweepRow> cmd_sweep(const RunConfig& cfg, std::ostream& out);

struct OracleReport {
    int samples = 0;
    int min_terms = 0;
    int max_terms = 0;
    double rho = 0.0;
    double max_residual = 0.0;
    double max_tail_bound = 0.0;
    bool per_sample_ok = true;  // every residual within the sum of its two tail bounds
    bool ok = false;            // max_residual <= 2 * max_tail_bound and per_sample_ok
    bool encoder_compared = false;
    Eigen::VectorXd fitted_scale;
    Eigen::VectorXd stored_scale;
    double encoder_relative_error = 0.0;
};

/// Series-oracle consistency report, written to `oracle_report.txt`; compares
/// with a trained encoder when checkpoints exist.
OracleReport cmd_oracle_check(const RunConfig& cfg, std::ostream& out);

}  // namespace uowc
