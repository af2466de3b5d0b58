#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "rdt/config.hpp"

namespace rdt {

inline constexpr std::string_view kVersion = "0.1.0";

struct RunOutcome {
  int exit_code = 0;  // 0 ran (see pass), 2 guard abort
  bool pass = false;
  std::filesystem::path directory;
};

/// Runs the flow, the auditors and (when configured) the exhaustion, and
/// writes snapshots.csv, profiles.csv, report.json and manifest.json into the
/// output directory. A guard abort writes error.json instead of the report.
RunOutcome run_experiment(const ExperimentConfig& config);

/// Re-runs the snapshot auditors on a snapshots.csv produced by `run` and
/// writes audit_report.json next to the config's output directory. The config
/// supplies geometry, grid and audit parameters.
RunOutcome audit_snapshots(const std::filesystem::path& csv, const ExperimentConfig& config);

/// One line per built-in geometry, in stable order.
std::string list_experiments();

/// Hypothesis bounds of the built-in spec for `name`. Unknown names throw
/// DomainError listing the valid ones.
std::string describe(std::string_view name);

/// The built-in spec used by list/describe.
GeometrySpec builtin_spec(GeometryKind kind);

}  // namespace rdt
