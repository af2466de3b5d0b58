#include "rdt/models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <fmt/format.h>
#include <fmt/ranges.h>

#include "rdt/error.hpp"

namespace rdt {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct NamedKind {
  std::string_view name;
  GeometryKind kind;
};

// Alphabetical, which is also the listing order.
constexpr NamedKind kNames[] = {
    {"flat_cone", GeometryKind::flat_cone},
    {"flat_plane", GeometryKind::flat_plane},
    {"hyperbolic_cusp", GeometryKind::hyperbolic_cusp},
    {"hyperbolic_plane", GeometryKind::hyperbolic_plane},
    {"perturbed_cone", GeometryKind::perturbed_cone},
    {"sphere", GeometryKind::round_sphere},
};

// u(r) = amplitude * sin(log r) with its first two derivatives.
Jet perturbation(const GeometrySpec& spec, double r) {
  const double s = std::log(r);
  const double a = spec.amplitude;
  return {a * std::sin(s), a * std::cos(s) / r, -a * (std::sin(s) + std::cos(s)) / (r * r)};
}

}  // namespace

void GeometrySpec::validate() const {
  if (kind == GeometryKind::flat_cone || kind == GeometryKind::perturbed_cone) {
    if (!(beta > 0.0 && beta <= 1.0)) throw DomainError("beta must be in (0,1]");
  }
  if (kind == GeometryKind::round_sphere && !(radius > 0.0))
    throw DomainError("sphere radius must be positive");
  if (kind == GeometryKind::perturbed_cone && !(amplitude >= 0.0))
    throw DomainError("perturbation amplitude must be nonnegative");
}

std::string_view geometry_name(GeometryKind kind) {
  for (const auto& n : kNames)
    if (n.kind == kind) return n.name;
  return "unknown";
}

GeometryKind parse_geometry(std::string_view name) {
  for (const auto& n : kNames)
    if (n.name == name) return n.kind;
  throw DomainError(fmt::format("unknown geometry '{}'; valid names: {}", name,
                                fmt::join(geometry_names(), ", ")));
}

std::vector<std::string> geometry_names() {
  std::vector<std::string> out;
  for (const auto& n : kNames) out.emplace_back(n.name);
  return out;
}

std::pair<double, double> chart_domain(const GeometrySpec& spec) {
  switch (spec.kind) {
    case GeometryKind::round_sphere:
      return {0.0, std::numbers::pi * spec.radius};
    case GeometryKind::hyperbolic_cusp:
      return {-kInf, kInf};
    default:
      return {0.0, kInf};
  }
}

double profile_bound(const GeometrySpec& spec) {
  if (spec.kind != GeometryKind::perturbed_cone) return 0.0;
  // rho <= r e^{a}, |u'| <= a / r, |u''| <= sqrt(2) a / r^2.
  const double a = spec.amplitude;
  return std::max(a * std::exp(a), std::numbers::sqrt2 * a * std::exp(2.0 * a));
}

WarpedProfile warped_profile(const GeometrySpec& spec) {
  spec.validate();
  const auto one = [](double) { return Jet{1.0, 0.0, 0.0}; };
  switch (spec.kind) {
    case GeometryKind::flat_plane:
      return {one, [](double r) { return Jet{r, 1.0, 0.0}; }};
    case GeometryKind::flat_cone:
      return {one, [b = spec.beta](double r) { return Jet{b * r, b, 0.0}; }};
    case GeometryKind::round_sphere:
      return {one, [R = spec.radius](double r) {
                return Jet{R * std::sin(r / R), std::cos(r / R), -std::sin(r / R) / R};
              }};
    case GeometryKind::hyperbolic_plane:
      return {one, [](double r) { return Jet{std::sinh(r), std::cosh(r), std::sinh(r)}; }};
    case GeometryKind::hyperbolic_cusp:
      return {one, [](double r) {
                const double e = std::exp(-r);
                return Jet{e, -e, e};
              }};
    case GeometryKind::perturbed_cone: {
      const GeometrySpec s = spec;
      auto radial = [s](double r) {
        const Jet u = perturbation(s, r);
        const double e = std::exp(u.value);
        return Jet{e, u.d1 * e, (u.d2 + u.d1 * u.d1) * e};
      };
      auto angular = [s](double r) {
        const Jet u = perturbation(s, r);
        const double e = s.beta * std::exp(u.value);
        return Jet{r * e, e * (1.0 + r * u.d1), e * (2.0 * u.d1 + r * u.d1 * u.d1 + r * u.d2)};
      };
      return {radial, angular};
    }
  }
  throw DomainError("unhandled geometry kind");
}

std::vector<double> distance_to_singularity(const GeometrySpec& spec, const RadialGrid& grid) {
  std::vector<double> rho(grid.size(), kInf);
  switch (spec.kind) {
    case GeometryKind::flat_cone:
      std::copy(grid.values().begin(), grid.values().end(), rho.begin());
      break;
    case GeometryKind::perturbed_cone: {
      // Radial arc length from the tip, integrated in sigma = log s:
      //   rho(r) = int_{-inf}^{log r} exp(sigma + u(e^sigma)) dsigma.
      using boost::math::quadrature::gauss_kronrod;
      auto integrand = [&spec](double sigma) {
        return std::exp(sigma + perturbation(spec, std::exp(sigma)).value);
      };
      for (std::size_t i = 0; i < grid.size(); ++i) {
        const double top = std::log(grid.r(i));
        rho[i] = gauss_kronrod<double, 31>::integrate(integrand, top - 60.0, top, 15, 1e-14);
      }
      break;
    }
    default:
      break;
  }
  return rho;
}

std::shared_ptr<const BackgroundGeometry> instantiate(const GeometrySpec& spec, GridPtr grid) {
  spec.validate();
  const auto [lo, hi] = chart_domain(spec);
  if (!(grid->inner_radius() > lo && grid->outer_radius() < hi))
    throw DomainError(fmt::format("grid [{}, {}] leaves the chart of {}", grid->inner_radius(),
                                  grid->outer_radius(), geometry_name(spec.kind)));
  auto rho = distance_to_singularity(spec, *grid);
  return std::make_shared<const BackgroundGeometry>(std::move(grid), warped_profile(spec),
                                                    std::move(rho));
}

double constant_curvature(const GeometrySpec& spec) {
  switch (spec.kind) {
    case GeometryKind::round_sphere:
      return 1.0 / (spec.radius * spec.radius);
    case GeometryKind::hyperbolic_plane:
    case GeometryKind::hyperbolic_cusp:
      return -1.0;
    default:
      throw DomainError(
          fmt::format("{} has no constant-curvature homothety", geometry_name(spec.kind)));
  }
}

double homothety_factor(const GeometrySpec& spec, double t) {
  const double k = constant_curvature(spec);
  if (t < 0.0) throw DomainError("homothety time must be nonnegative");
  const double c = 1.0 - 2.0 * k * t;
  if (!(c > 0.0))
    throw DomainError(fmt::format("homothety solution degenerates at t = {} (limit {})", t,
                                  0.5 / k));
  return c;
}

MetricField exact_homothety_solution(const GeometrySpec& spec, const BackgroundGeometry& bg,
                                     double t) {
  return bg.metric().scaled(homothety_factor(spec, t));
}

BoundaryData homothety_boundary(const GeometrySpec& spec, const BackgroundGeometry& bg) {
  const Sym2 inner = bg.metric().components().front();
  const Sym2 outer = bg.metric().components().back();
  const double k = constant_curvature(spec);
  // Past the collapse time the data degenerate to zero and the guard takes over.
  return [k, inner, outer](double t) {
    const double c = std::max(1.0 - 2.0 * k * t, 0.0);
    return std::pair<Sym2, Sym2>{c * inner, c * outer};
  };
}

std::vector<double> conformal_scalar_oracle(std::vector<double> u0, const GeometrySpec& spec,
                                            const RadialGrid& grid, double t_final,
                                            const StepControl& control) {
  if (spec.kind != GeometryKind::flat_plane && spec.kind != GeometryKind::flat_cone)
    throw DomainError("scalar oracle needs a flat plane or flat cone background");
  control.validate();
  const std::size_t n = grid.size();
  if (u0.size() != n) throw ShapeError("initial data does not match grid");
  const auto r = grid.values();

  // Three-point weights for u' and u'' on the nonuniform interior nodes.
  struct Weights {
    double d1[3];
    double d2[3];
  };
  std::vector<Weights> w(n);
  double h_min = kInf;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double h1 = r[i] - r[i - 1];
    const double h2 = r[i + 1] - r[i];
    h_min = std::min({h_min, h1, h2});
    w[i].d1[0] = -h2 / (h1 * (h1 + h2));
    w[i].d1[1] = (h2 - h1) / (h1 * h2);
    w[i].d1[2] = h1 / (h2 * (h1 + h2));
    w[i].d2[0] = 2.0 / (h1 * (h1 + h2));
    w[i].d2[1] = -2.0 / (h1 * h2);
    w[i].d2[2] = 2.0 / (h2 * (h1 + h2));
  }

  auto rate = [&](const std::vector<double>& u, std::vector<double>& out) {
    out.front() = 0.0;
    out.back() = 0.0;
    for (std::size_t i = 1; i + 1 < n; ++i) {
      const double du = w[i].d1[0] * u[i - 1] + w[i].d1[1] * u[i] + w[i].d1[2] * u[i + 1];
      const double ddu = w[i].d2[0] * u[i - 1] + w[i].d2[1] * u[i] + w[i].d2[2] * u[i + 1];
      out[i] = std::exp(-2.0 * u[i]) * (ddu + du / r[i]);
    }
  };

  std::vector<double> u = std::move(u0);
  std::vector<double> k1(n), k2(n), k3(n), k4(n), tmp(n);
  double t = 0.0;
  std::size_t steps = 0;
  while (t < t_final) {
    if (++steps > control.max_steps) throw Error("scalar oracle step budget exhausted");
    double coeff = 0.0;
    for (double v : u) coeff = std::max(coeff, std::exp(-2.0 * v));
    double dt = std::min(control.cfl_fraction * h_min * h_min / (2.0 * kDim * coeff), control.max_dt);
    const bool last = t + dt >= t_final;
    if (last) dt = t_final - t;
    rate(u, k1);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = u[i] + 0.5 * dt * k1[i];
    rate(tmp, k2);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = u[i] + 0.5 * dt * k2[i];
    rate(tmp, k3);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = u[i] + dt * k3[i];
    rate(tmp, k4);
    for (std::size_t i = 0; i < n; ++i) {
      u[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
      if (!std::isfinite(u[i])) throw NonFiniteError(t + dt, i);
    }
    t = last ? t_final : t + dt;
  }
  return u;
}

}  // namespace rdt
