#include <doctest.h>

#include <cmath>
#include <numbers>

#include "rdt/error.hpp"
#include "rdt/flow.hpp"
#include "rdt/models.hpp"
#include "support.hpp"

using namespace rdt;
using rdt::testing::background;
using rdt::testing::interior_max_diff;

namespace {

// c' = -2K with c(0) = 1, integrated independently by RK4 on a fine step.
double ode_homothety(double curvature, double t) {
  const int steps = 1000;
  const double h = t / steps;
  double c = 1.0;
  auto f = [curvature](double) { return -2.0 * curvature; };
  for (int i = 0; i < steps; ++i) {
    const double k1 = f(c), k2 = f(c + 0.5 * h * k1), k3 = f(c + 0.5 * h * k2), k4 = f(c + h * k3);
    c += h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
  }
  return c;
}

}  // namespace

TEST_CASE("geometry names") {
  CHECK(geometry_names() == std::vector<std::string>{"flat_cone", "flat_plane", "hyperbolic_cusp",
                                                     "hyperbolic_plane", "perturbed_cone",
                                                     "sphere"});
  for (const auto& name : geometry_names()) CHECK(geometry_name(parse_geometry(name)) == name);
  try {
    parse_geometry("torus");
    FAIL("expected a domain error");
  } catch (const DomainError& e) {
    CHECK(std::string(e.what()).find("flat_cone") != std::string::npos);
  }
}

TEST_CASE("geometry parameter validation") {
  GeometrySpec s;
  s.kind = GeometryKind::flat_cone;
  s.beta = 0.0;
  CHECK_THROWS_AS(s.validate(), DomainError);
  s.beta = 1.5;
  CHECK_THROWS_AS(s.validate(), DomainError);
  s.beta = 1.0;
  CHECK_NOTHROW(s.validate());
  s.kind = GeometryKind::round_sphere;
  s.radius = -1.0;
  CHECK_THROWS_AS(s.validate(), DomainError);
}

TEST_CASE("grid must lie inside the chart") {
  GeometrySpec s;
  s.kind = GeometryKind::round_sphere;
  CHECK_THROWS_AS(instantiate(s, RadialGrid::make(32, Spacing::uniform, 0.5, 3.5)), DomainError);
  s.kind = GeometryKind::hyperbolic_cusp;
  CHECK_NOTHROW(instantiate(s, RadialGrid::make(32, Spacing::uniform, -1.0, 3.0)));
}

TEST_CASE("flat cone") {
  const auto bg = background(GeometryKind::flat_cone, 64, Spacing::log_uniform, 0.05, 1.0, 0.5);
  CHECK(bg->k0() == 0.0);
  CHECK(bg->riemann().max_abs() == 0.0);
  CHECK(!bg->complete());
  const auto g = RadialGrid::from_values(std::vector<double>{0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 1.75,
                                                             2.0, 2.25, 2.5, 2.75, 3.0, 3.25, 3.5,
                                                             3.75, 4.0},
                                         Spacing::uniform);
  GeometrySpec s;
  s.kind = GeometryKind::flat_cone;
  s.beta = 0.5;
  CHECK(distance_to_singularity(s, *g).front() == 0.25);
}

TEST_CASE("round sphere curvature") {
  const auto bg = background(GeometryKind::round_sphere, 256, Spacing::uniform, 0.5,
                             std::numbers::pi - 0.5);
  for (double k : bg->gaussian_curvature()) CHECK(k == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(bg->k0() == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(bg->complete());
  for (double r : bg->rho()) CHECK(std::isinf(r));
  CHECK(interior_max_diff(riemann(bg->metric()), bg->riemann(), 0) < 1e-3);
}

TEST_CASE("hyperbolic variants have curvature -1") {
  for (auto kind : {GeometryKind::hyperbolic_plane, GeometryKind::hyperbolic_cusp}) {
    const auto bg = background(kind, 64, Spacing::uniform, 0.5, 2.0);
    for (double k : bg->gaussian_curvature()) CHECK(k == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(bg->k0() == doctest::Approx(4.0));
    CHECK(bg->complete());
  }
}

TEST_CASE("numeric curvature matches the analytic curvature to second order") {
  for (auto kind : {GeometryKind::round_sphere, GeometryKind::hyperbolic_plane,
                    GeometryKind::hyperbolic_cusp, GeometryKind::perturbed_cone}) {
    auto error_at = [kind](std::size_t n) {
      const auto bg = kind == GeometryKind::perturbed_cone
                          ? background(kind, n, Spacing::log_uniform, 0.05, 1.0, 0.7, 0.1)
                          : background(kind, n, Spacing::uniform, 0.6, 2.0);
      return interior_max_diff(riemann(bg->metric()), bg->riemann(), 1);
    };
    CAPTURE(static_cast<int>(kind));
    CHECK(error_at(64) / error_at(128) > 3.5);
  }
}

TEST_CASE("perturbed cone") {
  SUBCASE("zero amplitude is the flat cone") {
    const auto p = background(GeometryKind::perturbed_cone, 64, Spacing::log_uniform, 0.05, 1.0,
                              0.5, 0.0);
    const auto c = background(GeometryKind::flat_cone, 64, Spacing::log_uniform, 0.05, 1.0, 0.5);
    for (std::size_t i = 0; i < 64; ++i) {
      CHECK(p->metric()[i] == c->metric()[i]);
      CHECK(p->rho()[i] == doctest::Approx(c->rho()[i]).epsilon(1e-12));
    }
    CHECK(p->k0() == 0.0);
  }
  SUBCASE("distance to the tip is within ten percent of r") {
    const auto p = background(GeometryKind::perturbed_cone, 64, Spacing::log_uniform, 0.01, 2.0,
                              0.5, 0.05);
    for (std::size_t i = 0; i < 64; ++i) {
      const double r = p->grid()->r(i);
      CHECK(std::abs(p->rho()[i] - r) <= 0.1 * r);
    }
  }
  SUBCASE("rho is the radial arc length") {
    // Trapezoid in log r on a fine grid, from a tiny radius where rho ~ r e^u.
    GeometrySpec s;
    s.kind = GeometryKind::perturbed_cone;
    s.beta = 0.5;
    s.amplitude = 0.2;
    const auto grid = RadialGrid::make(16, Spacing::log_uniform, 0.1, 1.0);
    const auto rho = distance_to_singularity(s, *grid);
    const double lo = std::log(1e-12);
    for (std::size_t i = 0; i < 16; ++i) {
      const double hi = std::log(grid->r(i));
      const int m = 200000;
      const double h = (hi - lo) / m;
      auto f = [&](double sigma) { return std::exp(sigma + 0.2 * std::sin(sigma)); };
      double sum = 0.5 * (f(lo) + f(hi));
      for (int k = 1; k < m; ++k) sum += f(lo + k * h);
      CHECK(rho[i] == doctest::Approx(sum * h).epsilon(1e-6));
    }
  }
  SUBCASE("weighted curvature bounds hold on the grid") {
    const auto p = background(GeometryKind::perturbed_cone, 128, Spacing::log_uniform, 0.01, 1.0,
                              0.5, 0.1);
    REQUIRE(p->weighted_derivative_bounds().size() == 3);
    for (const auto& [s, c] : p->weighted_derivative_bounds()) {
      CAPTURE(s);
      CHECK(std::isfinite(c));
      CHECK(c > 0.0);
    }
    // |Rm| grows like 1/rho^2, so rho^2 |Rm| stays bounded while k0 reflects the inner radius.
    CHECK(p->k0() > 1.0);
  }
}

TEST_CASE("homothety solutions") {
  GeometrySpec sphere;
  sphere.kind = GeometryKind::round_sphere;
  GeometrySpec hyp;
  hyp.kind = GeometryKind::hyperbolic_plane;
  CHECK(homothety_factor(sphere, 0.0) == 1.0);
  CHECK(homothety_factor(sphere, 0.2) == doctest::Approx(0.6).epsilon(1e-14));
  CHECK(homothety_factor(sphere, 0.2) == doctest::Approx(ode_homothety(1.0, 0.2)).epsilon(1e-12));
  CHECK(homothety_factor(hyp, 0.25) == doctest::Approx(1.5).epsilon(1e-14));
  CHECK(homothety_factor(hyp, 0.25) == doctest::Approx(ode_homothety(-1.0, 0.25)).epsilon(1e-12));
  CHECK_THROWS_AS(homothety_factor(sphere, 0.5), DomainError);
  CHECK_THROWS_AS(homothety_factor(sphere, 0.7), DomainError);
  GeometrySpec cone;
  CHECK_THROWS_AS(homothety_factor(cone, 0.1), DomainError);

  const auto bg = instantiate(sphere, RadialGrid::make(64, Spacing::uniform, 0.5, 2.5));
  const MetricField g0 = exact_homothety_solution(sphere, *bg, 0.0);
  for (std::size_t i = 0; i < 64; ++i) CHECK(g0[i] == bg->metric()[i]);
}

TEST_CASE("homothety solutions satisfy the flow equation") {
  for (auto kind : {GeometryKind::round_sphere, GeometryKind::hyperbolic_plane}) {
    GeometrySpec s;
    s.kind = kind;
    const double K = constant_curvature(s);
    auto residual_at = [&](std::size_t n, double t) {
      const auto bg = instantiate(s, RadialGrid::make(n, Spacing::uniform, 0.6, 2.4));
      const TensorField rhs = flow_rhs(exact_homothety_solution(s, *bg, t), *bg);
      const TensorField expected = (-2.0 * K) * TensorField::from_metric(bg->metric());
      return interior_max_diff(rhs, expected, 1);
    };
    for (double t : {0.0, 0.1, 0.3}) {
      CAPTURE(t);
      const double coarse = residual_at(64, t), fine = residual_at(128, t);
      CHECK(fine < 1e-2);
      CHECK(coarse / fine > 3.5);
    }
  }
}

TEST_CASE("scalar oracle") {
  GeometrySpec plane;
  plane.kind = GeometryKind::flat_plane;
  const auto grid = RadialGrid::make(64, Spacing::uniform, 0.5, 1.5);
  StepControl control;
  SUBCASE("zero and constant data are stationary") {
    for (double c : {0.0, 0.3}) {
      const auto u = conformal_scalar_oracle(std::vector<double>(64, c), plane, *grid, 0.01, control);
      for (double v : u) CHECK(v == doctest::Approx(c).epsilon(1e-14));
    }
  }
  SUBCASE("bump decays and keeps its end values") {
    std::vector<double> u0(64);
    for (std::size_t i = 0; i < 64; ++i)
      u0[i] = 0.1 * std::exp(-std::pow(grid->r(i) - 1.0, 2) / 0.02);
    const auto u = conformal_scalar_oracle(u0, plane, *grid, 0.01, control);
    CHECK(u.front() == u0.front());
    CHECK(u.back() == u0.back());
    CHECK(*std::max_element(u.begin(), u.end()) < *std::max_element(u0.begin(), u0.end()));
  }
  SUBCASE("non-flat backgrounds are rejected") {
    GeometrySpec sphere;
    sphere.kind = GeometryKind::round_sphere;
    CHECK_THROWS_AS(conformal_scalar_oracle(std::vector<double>(64), sphere, *grid, 0.01, control),
                    DomainError);
  }
}
