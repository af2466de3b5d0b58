#pragma once

#include <cstddef>
#include <memory>
#include <utility>
#include <vector>

#include "rdt/error.hpp"
#include "rdt/flow.hpp"
#include "rdt/models.hpp"

namespace rdt {

struct ExhaustionParams {
  double rho0 = 0.2;   // inner radius of D_0
  double q = 0.5;      // inner radius ratio between consecutive domains
  int k_max = 4;       // number of domains
  double r_max = 1.0;  // fixed outer radius
  double window_lo = 0.4;
  double window_hi = 0.8;
  /// Log-uniform points per factor 1/q; every D_k shares the lattice
  /// r_j = rho0 exp(j log(1/q) / points_per_ratio).
  int points_per_ratio = 32;
};

/// Nested annuli D_k = [rho0 q^k, R] on one log-uniform lattice, so that the
/// window points coincide bitwise across k. R is r_max snapped to the lattice.
struct ExhaustionSchedule {
  ExhaustionParams params;
  std::vector<GridPtr> grids;  // one per k
  double outer_radius = 0.0;

  std::size_t depth() const { return grids.size(); }
  double inner_radius(std::size_t k) const { return grids.at(k)->inner_radius(); }
  /// Index range [first, last] of the window on the grid of D_k.
  std::pair<std::size_t, std::size_t> window_indices(std::size_t k) const;
};

ExhaustionSchedule build_exhaustion(const ExhaustionParams& params);

struct ExhaustionMember {
  std::size_t k = 0;
  std::shared_ptr<const BackgroundGeometry> background;
  std::vector<FlowState> snapshots;
};

/// A member of the exhaustion failed; carries its index.
class MemberFailure : public Error {
 public:
  MemberFailure(std::size_t k, const std::string& what);
  std::size_t member() const { return k_; }

 private:
  std::size_t k_;
};

/// Solves the Dirichlet problem g = g_bg on both ends of every D_k up to
/// t_final with the same snapshot times. Members run on worker threads.
std::vector<ExhaustionMember> run_exhaustion(const ExhaustionSchedule& schedule,
                                             const GeometrySpec& spec, const StepControl& control,
                                             double t_final);

struct ConvergenceReport {
  int max_order = 0;
  /// gaps[m][k] = sup over window and snapshots of |nabla^m (g(k+1) - g(k))|.
  std::vector<std::vector<double>> gaps;
  bool monotone = true;
  double final_gap = 0.0;
  double tolerance = 0.0;
  double slack = 0.1;
  double noise_floor = 1e-12;
  bool pass = true;
};

/// Cauchy gaps between consecutive members on the shared window, for orders
/// 0..max_order. Members are ordered by k and snapshots paired by time. Monotone means
/// d_{k+1} <= (1 + slack) d_k + noise_floor for every order.
ConvergenceReport diagonal_convergence(const std::vector<ExhaustionMember>& members,
                                       const ExhaustionSchedule& schedule, int max_order,
                                       double tolerance);

}  // namespace rdt
