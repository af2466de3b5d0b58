#include <doctest.h>

#include <cmath>

#include "rdt/error.hpp"
#include "rdt/flow.hpp"
#include "rdt/models.hpp"
#include "support.hpp"

using namespace rdt;
using rdt::testing::background;
using rdt::testing::interior_max_diff;

namespace {

double max_metric_diff(const MetricField& a, const MetricField& b, std::size_t skip = 0) {
  double e = 0.0;
  for (std::size_t i = skip; i + skip < a.size(); ++i) {
    const Sym2 d = a[i] - b[i];
    e = std::max({e, std::abs(d.rr), std::abs(d.rt), std::abs(d.tt)});
  }
  return e;
}

}  // namespace

TEST_CASE("flow right-hand side on model geometries") {
  SUBCASE("flat cone is stationary") {
    const auto bg = background(GeometryKind::flat_cone, 128, Spacing::log_uniform, 0.05, 1.0, 0.5);
    CHECK(flow_rhs(bg->metric(), *bg).max_abs() < 1e-8);
  }
  SUBCASE("sphere gives -2 g") {
    auto error_at = [](std::size_t n) {
      const auto bg = background(GeometryKind::round_sphere, n, Spacing::uniform, 0.6, 2.4);
      return interior_max_diff(flow_rhs(bg->metric(), *bg),
                               -2.0 * TensorField::from_metric(bg->metric()), 0);
    };
    CHECK(error_at(128) < 1e-2);
    CHECK(error_at(64) / error_at(128) > 3.5);
  }
  SUBCASE("hyperbolic plane gives +2 g") {
    // g_thth = sinh^2 r reaches ~30, so the error is measured relative to |g|.
    auto error_at = [](std::size_t n) {
      const auto bg = background(GeometryKind::hyperbolic_plane, n, Spacing::uniform, 0.6, 2.4);
      const TensorField gb = TensorField::from_metric(bg->metric());
      return interior_max_diff(flow_rhs(bg->metric(), *bg), 2.0 * gb, 0) / gb.max_abs();
    };
    CHECK(error_at(128) < 1e-2);
    CHECK(error_at(64) / error_at(128) > 3.5);
  }
  SUBCASE("rhs is symmetric") {
    const auto bg = background(GeometryKind::round_sphere, 64, Spacing::uniform, 0.6, 2.4);
    std::mt19937_64 rng(8);
    const TensorField rhs = flow_rhs(rdt::testing::RandomSmoothMetric(rng, 0.2).on(*bg), *bg);
    for (std::size_t p = 0; p < 64; ++p) CHECK(rhs(p, {0, 1}) == rhs(p, {1, 0}));
  }
}

TEST_CASE("cfl timestep") {
  StepControl control;
  control.cfl_fraction = 0.8;
  const auto bg = background(GeometryKind::flat_plane, 65, Spacing::uniform, 0.5, 1.5);
  const double h = 1.0 / 64;
  CHECK(cfl_timestep(bg->metric(), control) == doctest::Approx(0.8 * h * h / 4).epsilon(1e-12));
  const auto fine = background(GeometryKind::flat_plane, 129, Spacing::uniform, 0.5, 1.5);
  CHECK(cfl_timestep(fine->metric(), control) ==
        doctest::Approx(cfl_timestep(bg->metric(), control) / 4).epsilon(1e-12));
  CHECK(cfl_timestep(bg->metric().scaled(2.0), control) ==
        doctest::Approx(2 * cfl_timestep(bg->metric(), control)).epsilon(1e-12));
  control.max_dt = 1e-6;
  CHECK(cfl_timestep(bg->metric(), control) == 1e-6);
}

TEST_CASE("step control validation") {
  StepControl c;
  c.cfl_fraction = 0.0;
  CHECK_THROWS(c.validate());
  c.cfl_fraction = 1.5;
  CHECK_THROWS(c.validate());
  c.cfl_fraction = 1.0;
  CHECK_NOTHROW(c.validate());
}

TEST_CASE("stationarity") {
  StepControl control;
  SUBCASE("flat plane over 1000 steps") {
    const auto bg = background(GeometryKind::flat_plane, 64, Spacing::uniform, 0.5, 1.5);
    FlowState s{0.0, bg->metric()};
    for (int i = 0; i < 1000; ++i) s = step(s, bg, control);
    CHECK(s.step_count == 1000);
    CHECK(s.t > 0.0);
    CHECK(max_metric_diff(s.g, bg->metric()) <= 1e-10);
  }
  SUBCASE("flat cone over 1000 steps") {
    const auto bg = background(GeometryKind::flat_cone, 64, Spacing::log_uniform, 0.1, 1.0, 0.5);
    FlowState s{0.0, bg->metric()};
    for (int i = 0; i < 1000; ++i) s = step(s, bg, control);
    const double h = bg->grid()->min_spacing();
    CHECK(max_metric_diff(s.g, bg->metric()) <= 5 * h * h);
  }
}

TEST_CASE("sphere step shrinks the metric by 1 - 2 dt") {
  GeometrySpec sphere;
  sphere.kind = GeometryKind::round_sphere;
  const auto bg = instantiate(sphere, RadialGrid::make(128, Spacing::uniform, 0.6, 2.4));
  StepControl control;
  FlowState s{0.0, bg->metric()};
  s = step(s, bg, control, homothety_boundary(sphere, *bg));
  const double dt = s.t;
  const double h = bg->grid()->min_spacing();
  for (const auto& lam : relative_eigenvalues(s.g, *bg)) {
    CHECK(std::abs(lam[0] - (1 - 2 * dt)) <= dt * dt + dt * h * h * 10);
    CHECK(std::abs(lam[1] - (1 - 2 * dt)) <= dt * dt + dt * h * h * 10);
  }
}

TEST_CASE("guard aborts on a huge step") {
  const auto bg = background(GeometryKind::round_sphere, 64, Spacing::uniform, 0.6, 2.4);
  FlowEngine engine(bg);
  StepControl control;
  FlowState s{0.0, bg->metric()};
  bool caught = false;
  try {
    engine.advance(s, 10.0, control, {});
  } catch (const SpdViolation& e) {
    caught = true;
    CHECK(e.time() == 10.0);
    CHECK(e.index() < 64);
    CHECK(e.eigenvalue() <= 1e-12);
  } catch (const NonFiniteError&) {
    caught = true;
  }
  CHECK(caught);
}

TEST_CASE("dirichlet runs") {
  StepControl control;
  SUBCASE("flat cone snapshots equal the background") {
    const auto bg = background(GeometryKind::flat_cone, 64, Spacing::log_uniform, 0.1, 1.0, 0.5);
    control.snapshot_interval = 0.0005;
    const auto snaps = run_dirichlet({bg, {}, {}, 0.002}, control);
    REQUIRE(snaps.size() == 5);
    for (std::size_t k = 0; k < snaps.size(); ++k) {
      CHECK(snaps[k].t == doctest::Approx(0.0005 * k).epsilon(1e-14));
      CHECK(max_metric_diff(snaps[k].g, bg->metric()) <= 1e-10);
    }
    CHECK(snaps.back().t == 0.002);
  }
  SUBCASE("t_final = 0 gives one snapshot") {
    const auto bg = background(GeometryKind::flat_cone, 32, Spacing::log_uniform, 0.1, 1.0, 0.5);
    const auto snaps = run_dirichlet({bg, {}, {}, 0.0}, control);
    REQUIRE(snaps.size() == 1);
    CHECK(snaps[0].t == 0.0);
    CHECK(max_metric_diff(snaps[0].g, bg->metric()) == 0.0);
  }
  SUBCASE("boundary rows are pinned bitwise and symmetry is kept") {
    const auto bg = background(GeometryKind::perturbed_cone, 64, Spacing::log_uniform, 0.05, 1.0,
                               0.5, 0.1);
    std::vector<Sym2> g0(bg->metric().components().begin(), bg->metric().components().end());
    for (std::size_t i = 1; i + 1 < g0.size(); ++i) g0[i] = 1.05 * g0[i];
    FlowEngine engine(bg);
    FlowState s{0.0, MetricField(bg->grid(), g0)};
    for (int i = 0; i < 200; ++i) {
      s = engine.advance(s, cfl_timestep(s.g, control), control, {});
      REQUIRE(s.g[0] == bg->metric()[0]);
      REQUIRE(s.g[63] == bg->metric()[63]);
    }
    for (const auto& c : s.g.components()) CHECK(std::abs(c.rt) <= 1e-12);
    CHECK(s.diagnostics.lambda_max > 1.0);
  }
  SUBCASE("step budget") {
    const auto bg = background(GeometryKind::flat_plane, 32, Spacing::uniform, 0.5, 1.5);
    control.max_steps = 3;
    CHECK_THROWS_AS(run_dirichlet({bg, {}, {}, 1.0}, control), Error);
  }
}

TEST_CASE("sphere homothety converges at second order") {
  GeometrySpec sphere;
  sphere.kind = GeometryKind::round_sphere;
  auto error_at = [&](std::size_t n) {
    const auto bg = instantiate(sphere, RadialGrid::make(n, Spacing::uniform, 0.6, 2.4));
    StepControl control;
    DirichletProblem p{bg, {}, homothety_boundary(sphere, *bg), 0.05};
    const auto snaps = run_dirichlet(p, control);
    return max_metric_diff(snaps.back().g, exact_homothety_solution(sphere, *bg, 0.05));
  };
  const double coarse = error_at(32), fine = error_at(64);
  CHECK(coarse / fine >= 3.5);
}
