#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "rdt/error.hpp"
#include "rdt/exhaustion.hpp"
#include "rdt/grid.hpp"
#include "rdt/models.hpp"

namespace rdt {

/// Schema or semantic violation in an experiment config. The message names
/// the offending key.
class ConfigError : public Error {
 public:
  using Error::Error;
};

struct GridConfig {
  std::size_t n = 64;
  Spacing spacing = Spacing::log_uniform;
  double r_min = 0.1;
  double r_max = 1.0;
  friend bool operator==(const GridConfig&, const GridConfig&) = default;
};

enum class BoundaryMode { pinned, exact };

struct FlowConfig {
  double cfl_fraction = 0.5;
  double max_dt = std::numeric_limits<double>::infinity();
  double t_final = 0.01;
  double snapshot_interval = 0.0;  // 0: initial and final state only
  bool spd_guard = true;
  /// pinned: g = g_bg on both ends. exact: ends follow the homothety solution
  /// (constant-curvature geometries only).
  BoundaryMode boundary = BoundaryMode::pinned;
  friend bool operator==(const FlowConfig&, const FlowConfig&) = default;
};

struct ExhaustionConfig {
  ExhaustionParams params;
  double t_final = 0.002;
  double snapshot_interval = 0.0;
  double tolerance = 1e-6;
  int max_order = 1;
  friend bool operator==(const ExhaustionConfig& a, const ExhaustionConfig& b) {
    return a.params.rho0 == b.params.rho0 && a.params.q == b.params.q &&
           a.params.k_max == b.params.k_max && a.params.r_max == b.params.r_max &&
           a.params.window_lo == b.params.window_lo && a.params.window_hi == b.params.window_hi &&
           a.params.points_per_ratio == b.params.points_per_ratio && a.t_final == b.t_final &&
           a.snapshot_interval == b.snapshot_interval && a.tolerance == b.tolerance &&
           a.max_order == b.max_order;
  }
};

struct AuditConfig {
  std::vector<double> deltas{0.05, 0.1, 0.2};
  int max_order = 2;  // derivative orders 1..max_order, curvature orders 0..max_order-2
  double exponent_slack = 0.2;
  double outer_collar = 0.25;
  double rho_max = 1.0;
  double noise_floor = 1e-10;
  friend bool operator==(const AuditConfig&, const AuditConfig&) = default;
};

struct ExperimentConfig {
  GeometrySpec geometry;
  GridConfig grid;
  FlowConfig flow;
  std::optional<ExhaustionConfig> exhaustion;
  AuditConfig audit;
  std::string output_directory = "rdt_output";
  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;

  StepControl step_control() const;
};

ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig parse_config(const std::filesystem::path& path);

/// Canonical JSON with every default spelled out; parses back to an equal
/// config.
std::string serialize_config(const ExperimentConfig& config);

std::string_view to_string(BoundaryMode mode);

/// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view bytes);

}  // namespace rdt
