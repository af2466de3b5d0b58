#include <doctest.h>

#include <cmath>
#include <vector>

#include "rdt/error.hpp"
#include "rdt/grid.hpp"

using namespace rdt;

TEST_CASE("fd weights reproduce derivatives of polynomials") {
  const std::vector<double> nodes{0.1, 0.25, 0.33, 0.6};
  const auto w1 = fd_weights(0.25, nodes, 1);
  const auto w2 = fd_weights(0.25, nodes, 2);
  // f = x^3 - 2 x^2 + x: exact for a four-point stencil.
  auto f = [](double x) { return x * x * x - 2 * x * x + x; };
  double d1 = 0.0, d2 = 0.0;
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    d1 += w1[k] * f(nodes[k]);
    d2 += w2[k] * f(nodes[k]);
  }
  CHECK(d1 == doctest::Approx(3 * 0.0625 - 4 * 0.25 + 1).epsilon(1e-12));
  CHECK(d2 == doctest::Approx(6 * 0.25 - 4).epsilon(1e-12));
}

TEST_CASE("uniform grid endpoints and spacing") {
  const auto g = RadialGrid::make(33, Spacing::uniform, 0.5, 1.5);
  CHECK(g->r(0) == 0.5);
  CHECK(g->r(32) == 1.5);
  CHECK(g->min_spacing() == doctest::Approx(1.0 / 32));
}

TEST_CASE("log-uniform grid has constant ratio") {
  const auto g = RadialGrid::make(100, Spacing::log_uniform, 0.01, 1.0);
  CHECK(g->inner_radius() == 0.01);
  CHECK(g->outer_radius() == 1.0);
  const double q = g->r(1) / g->r(0);
  for (std::size_t i = 1; i + 1 < g->size(); ++i)
    CHECK(std::abs(g->r(i + 1) / g->r(i) - q) <= 1e-12 * q);
}

TEST_CASE("grid contract violations") {
  CHECK_THROWS_AS(RadialGrid::make(8, Spacing::uniform, 0.0, 1.0), DomainError);
  CHECK_THROWS_AS(RadialGrid::make(32, Spacing::uniform, 1.0, 1.0), DomainError);
  CHECK_THROWS_AS(RadialGrid::make(32, Spacing::log_uniform, 0.0, 1.0), DomainError);
  std::vector<double> bad(20);
  for (std::size_t i = 0; i < bad.size(); ++i) bad[i] = 1.0 + i * i * 0.1;
  CHECK_THROWS_AS(RadialGrid::from_values(bad, Spacing::log_uniform), DomainError);
  bad[5] = bad[4];
  CHECK_THROWS_AS(RadialGrid::from_values(bad, Spacing::uniform), DomainError);
}

TEST_CASE("differentiation is second order on a stretched grid") {
  auto error_at = [](std::size_t n) {
    const auto g = RadialGrid::make(n, Spacing::log_uniform, 0.1, 2.0);
    std::vector<double> f(n);
    for (std::size_t i = 0; i < n; ++i) f[i] = std::sin(3 * g->r(i));
    const auto d1 = g->differentiate(f);
    const auto d2 = g->differentiate2(f);
    double e = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      e = std::max(e, std::abs(d1[i] - 3 * std::cos(3 * g->r(i))));
      e = std::max(e, std::abs(d2[i] + 9 * std::sin(3 * g->r(i))));
    }
    return e;
  };
  const double coarse = error_at(64), fine = error_at(128);
  CHECK(coarse / fine > 3.5);
}
