#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <memory>
#include <utility>
#include <vector>

#include "rdt/geometry.hpp"

namespace rdt {

/// Explicit RK4 step control with a parabolic CFL restriction.
struct StepControl {
  double cfl_fraction = 0.5;
  double max_dt = std::numeric_limits<double>::infinity();
  double t_final = 0.0;
  /// Snapshot spacing in time; 0 records only the initial and final states.
  double snapshot_interval = 0.0;
  bool spd_guard_enabled = true;
  std::size_t max_steps = 200'000'000;

  void validate() const;
};

struct Diagnostics {
  double lambda_min = 1.0;
  double lambda_max = 1.0;
  double max_deturck = 0.0;
};

struct FlowState {
  double t = 0.0;
  MetricField g;
  std::size_t step_count = 0;
  Diagnostics diagnostics;
};

/// Boundary values (inner, outer) as a function of time.
using BoundaryData = std::function<std::pair<Sym2, Sym2>(double)>;

/// Ricci de Turck flow on the annulus covered by the background's grid, with
/// Dirichlet data on both radial ends.
struct DirichletProblem {
  std::shared_ptr<const BackgroundGeometry> background;
  /// Initial metric; empty means the background metric.
  MetricField initial;
  /// Boundary data; empty pins both ends to the initial values.
  BoundaryData boundary;
  double t_final = 0.0;
};

/// -2 Ric(g) + nabla_i V_j + nabla_j V_i with nabla the connection of g and
/// V^k = g^{ij} (Gamma^k_ij(g) - Gamma^k_ij(g_bg)).
TensorField flow_rhs(const MetricField& g, const BackgroundGeometry& bg);

/// cfl_fraction * h_min^2 / (2 n max g^{rr}), capped at max_dt. g^{rr} is the
/// coefficient of the radial second derivative in the principal part.
double cfl_timestep(const MetricField& g, const StepControl& control);

/// Relative eigenvalue range and sup |V| of g against the background.
Diagnostics diagnose(const MetricField& g, const BackgroundGeometry& bg, bool with_deturck = true);

/// Evaluates the flow right-hand side. V is built in the background
/// orthonormal frame, so it vanishes exactly on conformal deformations.
/// Owns no mutable shared state.
class FlowEngine {
 public:
  explicit FlowEngine(std::shared_ptr<const BackgroundGeometry> bg);

  const BackgroundGeometry& background() const { return *bg_; }

  /// Right-hand side as symmetric components per point.
  void rhs(std::span<const Sym2> g, std::span<Sym2> out) const;

  /// One RK4 step of size dt. Boundary rows are overwritten with the boundary
  /// data at every stage, or held at their current values when none is given.
  /// Runs the guard on the result.
  FlowState advance(const FlowState& state, double dt, const StepControl& control,
                    const BoundaryData& boundary) const;

 private:
  // Background frame data: scales A, B, their radial derivatives, and the
  // frame rotation rate w = B' / (A B) with w'.
  struct FramePoint {
    double a, da, b, db, w, dw;
  };
  std::shared_ptr<const BackgroundGeometry> bg_;
  std::vector<FramePoint> frame_;
};

/// One step with the CFL timestep (capped by t_final when positive).
FlowState step(const FlowState& state, const std::shared_ptr<const BackgroundGeometry>& bg,
               const StepControl& control, const BoundaryData& boundary = {});

/// Integrates to t_final, recording snapshots every snapshot_interval (and at
/// t = 0 and t_final). Boundary values are applied exactly at every step.
std::vector<FlowState> run_dirichlet(const DirichletProblem& problem, const StepControl& control);

}  // namespace rdt
