#pragma once

#include "curveprop/config.hpp"
#include "curveprop/report.hpp"

#include <filesystem>
#include <optional>

namespace curveprop {

/// Runs the configured experiment. Relative data paths resolve against
/// `base_dir`. The returned report has no input hash.
Report run_experiment(const ExperimentConfig& config, const std::filesystem::path& base_dir = ".");

struct RunRequest
{
  ExperimentKind command = ExperimentKind::propagate;
  std::filesystem::path config_path;
  /// Overrides outputs.dir; the default is the current directory.
  std::optional<std::filesystem::path> out_dir;
};

/// Loads, validates, runs and emits the report. Returns the output directory.
std::filesystem::path run(const RunRequest& request);

} // namespace curveprop
