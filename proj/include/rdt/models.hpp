#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rdt/flow.hpp"
#include "rdt/geometry.hpp"

namespace rdt {

enum class GeometryKind {
  flat_plane,
  flat_cone,
  round_sphere,
  hyperbolic_plane,
  hyperbolic_cusp,
  perturbed_cone,
};

/// Conformal perturbation profiles u(r) for the perturbed cone
/// e^{2u} (dr^2 + beta^2 r^2 dtheta^2).
enum class PerturbationProfile { sin_log };

struct GeometrySpec {
  GeometryKind kind = GeometryKind::flat_cone;
  double beta = 1.0;       // cone angle factor, (0, 1]
  double radius = 1.0;     // sphere radius
  double amplitude = 0.0;  // perturbation amplitude
  PerturbationProfile profile = PerturbationProfile::sin_log;

  void validate() const;
  friend bool operator==(const GeometrySpec&, const GeometrySpec&) = default;
};

/// Stable CLI names: flat_cone, flat_plane, hyperbolic_cusp, hyperbolic_plane,
/// perturbed_cone, sphere.
std::string_view geometry_name(GeometryKind kind);
GeometryKind parse_geometry(std::string_view name);
std::vector<std::string> geometry_names();

/// Open interval of radii on which the chart of a variant is valid.
std::pair<double, double> chart_domain(const GeometrySpec& spec);

/// A with |u'| <= A / rho and |u''| <= A / rho^2 for the perturbation profile.
double profile_bound(const GeometrySpec& spec);

WarpedProfile warped_profile(const GeometrySpec& spec);

/// Distance to the singular point; +infinity for complete variants.
std::vector<double> distance_to_singularity(const GeometrySpec& spec, const RadialGrid& grid);

std::shared_ptr<const BackgroundGeometry> instantiate(const GeometrySpec& spec, GridPtr grid);

/// Sectional curvature of the constant-curvature variants.
double constant_curvature(const GeometrySpec& spec);

/// c(t) g_bg with c(t) = 1 - 2 K t; valid for sphere (t < 1 / (2K)) and the
/// curvature -1 variants.
double homothety_factor(const GeometrySpec& spec, double t);
MetricField exact_homothety_solution(const GeometrySpec& spec, const BackgroundGeometry& bg,
                                     double t);

/// Dirichlet data following the exact homothety solution at both ends.
BoundaryData homothety_boundary(const GeometrySpec& spec, const BackgroundGeometry& bg);

/// Independent scalar integrator of du/dt = e^{-2u} Lap u on a flat plane or
/// flat cone annulus, with u pinned to its initial end values. Uses its own
/// stencils, RK4 and the same CFL rule.
std::vector<double> conformal_scalar_oracle(std::vector<double> u0, const GeometrySpec& spec,
                                            const RadialGrid& grid, double t_final,
                                            const StepControl& control);

}  // namespace rdt
