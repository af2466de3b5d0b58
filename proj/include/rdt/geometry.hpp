#pragma once

#include <functional>
#include <map>
#include <utility>
#include <vector>

#include "rdt/tensor.hpp"

namespace rdt {

/// Value and first two radial derivatives of a profile function.
struct Jet {
  double value = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
};

/// Background of the form A(r)^2 dr^2 + B(r)^2 dtheta^2.
///
/// The orthonormal frame e_r = d_r / A, e_theta = d_theta / B is parallel along
/// radial curves, and along d_theta it rotates with rate B' / (A B). Covariant
/// derivatives are evaluated in this frame.
struct WarpedProfile {
  std::function<Jet(double)> radial;
  std::function<Jet(double)> angular;
};

/// Fixed initial metric with its analytic connection, curvature and distance
/// data. All norms are taken against it.
class BackgroundGeometry {
 public:
  /// `rho` holds the distance to the singular stratum per grid point
  /// (+infinity for complete geometries).
  BackgroundGeometry(GridPtr grid, WarpedProfile profile, std::vector<double> rho);

  const GridPtr& grid() const { return grid_; }
  const MetricField& metric() const { return metric_; }
  const TensorField& christoffel() const { return christoffel_; }
  /// All-lower R_ijkl.
  const TensorField& riemann() const { return riemann_; }
  const std::vector<double>& gaussian_curvature() const { return curvature_; }
  /// Bound k0 with |Rm|^2 <= k0 on the grid.
  double k0() const { return k0_; }
  /// c_s = sup over the grid of |nabla^s Rm|, s = 1, 2.
  const std::map<int, double>& derivative_bounds() const { return derivative_bounds_; }
  /// sup over the grid of rho^s |nabla^s Rm|, s = 0, 1, 2 (finite rho only).
  const std::map<int, double>& weighted_derivative_bounds() const { return weighted_bounds_; }
  const std::vector<double>& rho() const { return rho_; }
  bool complete() const;

  const WarpedProfile& profile() const { return profile_; }
  double radial_scale(std::size_t i) const { return radial_[i]; }
  double angular_scale(std::size_t i) const { return angular_[i]; }
  double rotation_rate(std::size_t i) const { return rotation_[i]; }

 private:
  GridPtr grid_;
  WarpedProfile profile_;
  std::vector<double> rho_;
  std::vector<double> radial_;
  std::vector<double> angular_;
  std::vector<double> rotation_;
  std::vector<double> curvature_;
  MetricField metric_;
  TensorField christoffel_;
  TensorField riemann_;
  double k0_ = 0.0;
  std::map<int, double> derivative_bounds_;
  std::map<int, double> weighted_bounds_;
};

/// Gamma^k_ij (slots upper, lower, lower) from finite differences of g.
TensorField christoffel(const MetricField& g);

/// Gamma(g) - Gamma(g_bg) = 1/2 g^{km} (nabla_j g_im + nabla_i g_jm - nabla_m g_ij),
/// evaluated with background covariant derivatives.
TensorField christoffel_difference(const MetricField& g, const BackgroundGeometry& bg);

/// V^k = g^{ij} (Gamma^k_ij - Gamma_bg^k_ij).
TensorField deturck_vector(const MetricField& g, const BackgroundGeometry& bg);

/// All-lower Riemann tensor R_{rho sigma mu nu} = g_{rho l} R^l_{sigma mu nu}, with
/// R_{ijij} = K det g for Gaussian curvature K. Ric_{sigma nu} = R^rho_{sigma rho nu}.
TensorField riemann(const MetricField& g);
TensorField ricci(const MetricField& g);
std::vector<double> scalar_curvature(const MetricField& g);

/// m-fold background covariant derivative; each application prepends one
/// covariant slot. Stencils are one-sided at the two grid ends.
TensorField covariant_derivative(const TensorField& t, const BackgroundGeometry& bg, int order = 1);

/// Covariant derivative with respect to the Levi-Civita connection of g,
/// obtained from the background one through the Christoffel difference.
TensorField covariant_derivative_of(const TensorField& t, const MetricField& g,
                                    const BackgroundGeometry& bg, int order = 1);

/// Pointwise norm with all indices raised and lowered by the background.
std::vector<double> background_norm(const TensorField& t, const BackgroundGeometry& bg);

/// Components of t in the background orthonormal frame, point-major.
std::vector<double> frame_components(const TensorField& t, const BackgroundGeometry& bg);

/// Eigenvalues of g relative to the background, ascending, per point.
std::vector<std::array<double, 2>> relative_eigenvalues(const MetricField& g,
                                                        const BackgroundGeometry& bg);

/// Index pairs (slot of A, slot of B) contracted in a product A * B.
using Contraction = std::vector<std::pair<int, int>>;

/// Orthonormal-frame check of |A * B| <= n^{pairs} |A| |B| for tensors of
/// arbitrary dimension n given as flat component arrays.
bool star_bound_holds(std::span<const double> a, int rank_a, std::span<const double> b,
                      int rank_b, const Contraction& pairs, int n);

/// Field version over the background frame; true when the bound holds at
/// every grid point.
bool star_bound_check(const TensorField& a, const TensorField& b, const Contraction& pairs,
                      const BackgroundGeometry& bg);

}  // namespace rdt
