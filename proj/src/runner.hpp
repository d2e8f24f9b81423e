#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace trisplit {

struct RunOverrides {
  std::optional<std::string> output_dir;
  std::optional<bool> strict_mode;
  std::optional<std::uint64_t> seed;
};

/// Executes a run config end to end: instantiate, tune or validate, solve,
/// write trace/constants/diagnostics files, print the diagnostics summary.
/// Returns the CLI exit code: 0 converged, 2 max-iterations, 3 assumption
/// violation, 4 divergence. Config and IO problems throw.
int command_run(const std::string &config_path, const RunOverrides &overrides);

/// Parameters, derived constants and the admissibility report as JSON text.
std::string command_tune(const std::string &config_path);

struct VerifyResult {
  int exit_code = 0; // 0 iff the descent and subgradient checks pass
  std::string report_json;
};

/// Re-runs the trace-level checks on stored outputs. Accepts a .csv or .json
/// trace next to the constants.json written by command_run.
VerifyResult command_verify(const std::string &trace_path, const std::string &constants_path);

} // namespace trisplit
