#include "rdt/exhaustion.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <fmt/format.h>

#include "rdt/parallel.hpp"

namespace rdt {

MemberFailure::MemberFailure(std::size_t k, const std::string& what)
    : Error(fmt::format("exhaustion member k = {}: {}", k, what)), k_(k) {}

namespace {

std::pair<std::size_t, std::size_t> window_range(const RadialGrid& grid, double lo, double hi) {
  const auto r = grid.values();
  const auto first = std::lower_bound(r.begin(), r.end(), lo);
  const auto last = std::upper_bound(r.begin(), r.end(), hi);
  if (first == r.end() || last == r.begin() || first >= last)
    throw DomainError(fmt::format("window [{}, {}] holds no grid points", lo, hi));
  return {static_cast<std::size_t>(first - r.begin()),
          static_cast<std::size_t>(last - r.begin()) - 1};
}

}  // namespace

std::pair<std::size_t, std::size_t> ExhaustionSchedule::window_indices(std::size_t k) const {
  return window_range(*grids.at(k), params.window_lo, params.window_hi);
}

ExhaustionSchedule build_exhaustion(const ExhaustionParams& p) {
  if (!(p.q > 0.0 && p.q < 1.0)) throw DomainError("q must be in (0,1)");
  if (p.k_max < 1) throw DomainError("k_max must be at least 1");
  if (p.points_per_ratio < 2) throw DomainError("points_per_ratio must be at least 2");
  if (!(p.rho0 > 0.0 && p.rho0 < p.r_max)) throw DomainError("need 0 < rho0 < r_max");
  if (!(p.window_lo < p.window_hi)) throw DomainError("window must be increasing");
  if (!(p.window_lo > p.rho0 && p.window_hi < p.r_max))
    throw DomainError(fmt::format("window [{}, {}] must lie inside D_0 = ({}, {})", p.window_lo,
                                  p.window_hi, p.rho0, p.r_max));

  const double step = std::log(1.0 / p.q) / p.points_per_ratio;
  const auto top = static_cast<long>(std::lround(std::log(p.r_max / p.rho0) / step));
  auto lattice = [&](long j) { return p.rho0 * std::exp(static_cast<double>(j) * step); };
  if (!(lattice(top) > p.window_hi))
    throw DomainError("r_max snaps to a lattice point inside the window");

  ExhaustionSchedule s;
  s.params = p;
  s.outer_radius = lattice(top);
  for (int k = 0; k < p.k_max; ++k) {
    const long bottom = -static_cast<long>(k) * p.points_per_ratio;
    std::vector<double> r;
    r.reserve(static_cast<std::size_t>(top - bottom + 1));
    for (long j = bottom; j <= top; ++j) r.push_back(lattice(j));
    r.front() = p.rho0 * std::pow(p.q, k);
    s.grids.push_back(RadialGrid::from_values(std::move(r), Spacing::log_uniform));
  }
  return s;
}

std::vector<ExhaustionMember> run_exhaustion(const ExhaustionSchedule& schedule,
                                             const GeometrySpec& spec, const StepControl& control,
                                             double t_final) {
  std::vector<ExhaustionMember> members(schedule.depth());
  parallel_for(members.size(), [&](std::size_t k) {
    try {
      auto bg = instantiate(spec, schedule.grids[k]);
      members[k].k = k;
      members[k].snapshots = run_dirichlet({bg, {}, {}, t_final}, control);
      members[k].background = std::move(bg);
    } catch (const std::exception& e) {
      throw MemberFailure(k, e.what());
    }
  });
  return members;
}

ConvergenceReport diagonal_convergence(const std::vector<ExhaustionMember>& input,
                                       const ExhaustionSchedule& schedule, int max_order,
                                       double tolerance) {
  if (max_order < 0) throw DomainError("derivative order must be nonnegative");
  ConvergenceReport report;
  report.max_order = max_order;
  report.tolerance = tolerance;
  report.gaps.assign(static_cast<std::size_t>(max_order) + 1, {});
  if (input.size() < 2) return report;

  // Members are compared in order of k, whatever order they arrive in.
  std::vector<const ExhaustionMember*> members;
  for (const auto& m : input) members.push_back(&m);
  std::stable_sort(members.begin(), members.end(),
                   [](const auto* a, const auto* b) { return a->k < b->k; });

  const double lo = schedule.params.window_lo, hi = schedule.params.window_hi;
  struct Window {
    std::size_t first, last;
  };
  std::vector<Window> windows;
  for (const auto* m : members) {
    const auto [a, b] = window_range(*m->background->grid(), lo, hi);
    windows.push_back({a, b});
  }
  // Window points must coincide exactly; no interpolation.
  for (std::size_t k = 0; k + 1 < members.size(); ++k) {
    const auto& ga = *members[k]->background->grid();
    const auto& gb = *members[k + 1]->background->grid();
    if (windows[k].last - windows[k].first != windows[k + 1].last - windows[k + 1].first)
      throw ShapeError(fmt::format("window sizes differ between members {} and {}", k, k + 1));
    for (std::size_t i = 0; i <= windows[k].last - windows[k].first; ++i)
      if (ga.r(windows[k].first + i) != gb.r(windows[k + 1].first + i))
        throw ShapeError(fmt::format("window grids differ between members {} and {}", k, k + 1));
  }

  // Snapshot pairing by time.
  std::vector<std::map<double, std::size_t>> by_time(members.size());
  for (std::size_t k = 0; k < members.size(); ++k)
    for (std::size_t s = 0; s < members[k]->snapshots.size(); ++s)
      by_time[k][members[k]->snapshots[s].t] = s;
  for (std::size_t k = 1; k < members.size(); ++k) {
    if (by_time[k].size() != by_time[0].size() ||
        !std::equal(by_time[k].begin(), by_time[k].end(), by_time[0].begin(),
                    [](const auto& a, const auto& b) { return a.first == b.first; }))
      throw ShapeError(fmt::format("snapshot times of member {} differ from member 0", k));
  }

  // nabla^m g for every member and snapshot, in time order.
  std::vector<std::vector<std::vector<TensorField>>> derivs(members.size());
  parallel_for(members.size(), [&](std::size_t k) {
    const auto& bg = *members[k]->background;
    for (const auto& [t, s] : by_time[k]) {
      std::vector<TensorField> orders;
      orders.push_back(TensorField::from_metric(members[k]->snapshots[s].g));
      for (int m = 1; m <= max_order; ++m)
        orders.push_back(covariant_derivative(orders.back(), bg, 1));
      derivs[k].push_back(std::move(orders));
    }
  });

  for (int m = 0; m <= max_order; ++m) {
    auto& gaps = report.gaps[static_cast<std::size_t>(m)];
    for (std::size_t k = 0; k + 1 < members.size(); ++k) {
      double gap = 0.0;
      const auto& bg = *members[k]->background;
      for (std::size_t s = 0; s < derivs[k].size(); ++s) {
        const TensorField& a = derivs[k][s][m];
        const TensorField& b = derivs[k + 1][s][m];
        TensorField diff(bg.grid(), a.slots());
        const std::size_t cpp = a.components_per_point();
        for (std::size_t i = windows[k].first; i <= windows[k].last; ++i) {
          const std::size_t j = windows[k + 1].first + (i - windows[k].first);
          for (std::size_t c = 0; c < cpp; ++c) diff.at(i, c) = a.at(i, c) - b.at(j, c);
        }
        const auto norms = background_norm(diff, bg);
        for (std::size_t i = windows[k].first; i <= windows[k].last; ++i)
          gap = std::max(gap, norms[i]);
      }
      gaps.push_back(gap);
    }
    for (std::size_t k = 0; k + 1 < gaps.size(); ++k)
      if (gaps[k + 1] > (1.0 + report.slack) * gaps[k] + report.noise_floor) report.monotone = false;
    report.final_gap = std::max(report.final_gap, gaps.back());
  }
  report.pass = report.monotone && report.final_gap <= tolerance;
  return report;
}

}  // namespace rdt
