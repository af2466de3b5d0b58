#include "rdt/grid.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "rdt/error.hpp"

namespace rdt {

Spacing parse_spacing(std::string_view name) {
  if (name == "uniform") return Spacing::uniform;
  if (name == "log_uniform") return Spacing::log_uniform;
  throw DomainError(fmt::format("unknown spacing mode '{}'", name));
}

std::string_view to_string(Spacing s) {
  return s == Spacing::uniform ? "uniform" : "log_uniform";
}

std::vector<double> fd_weights(double x0, std::span<const double> nodes, int order) {
  const int n = static_cast<int>(nodes.size()) - 1;
  // c[k][j]: weight of node j for derivative k, built up node by node.
  std::vector<std::vector<double>> c(order + 1, std::vector<double>(n + 1, 0.0));
  c[0][0] = 1.0;
  double c1 = 1.0;
  double c4 = nodes[0] - x0;
  for (int i = 1; i <= n; ++i) {
    const int mn = std::min(i, order);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = nodes[i] - x0;
    for (int j = 0; j < i; ++j) {
      const double c3 = nodes[i] - nodes[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k)
          c[k][i] = c1 * (k * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
        c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
      }
      for (int k = mn; k >= 1; --k) c[k][j] = (c4 * c[k][j] - k * c[k - 1][j]) / c3;
      c[0][j] = c4 * c[0][j] / c3;
    }
    c1 = c2;
  }
  return c[order];
}

namespace {

Stencil make_stencil(std::span<const double> r, std::size_t at, std::size_t first,
                     std::size_t count, int order) {
  Stencil s;
  s.first = first;
  s.count = count;
  const auto w = fd_weights(r[at], r.subspan(first, count), order);
  std::copy(w.begin(), w.end(), s.weights.begin());
  return s;
}

}  // namespace

RadialGrid::RadialGrid(std::vector<double> r, Spacing mode)
    : r_(std::move(r)), mode_(mode) {
  const std::size_t n = r_.size();
  d1_.reserve(n);
  d2_.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (i == 0) {
      d1_.push_back(make_stencil(r_, i, 0, 3, 1));
      d2_.push_back(make_stencil(r_, i, 0, 4, 2));
    } else if (i + 1 == n) {
      d1_.push_back(make_stencil(r_, i, n - 3, 3, 1));
      d2_.push_back(make_stencil(r_, i, n - 4, 4, 2));
    } else {
      d1_.push_back(make_stencil(r_, i, i - 1, 3, 1));
      d2_.push_back(make_stencil(r_, i, i - 1, 3, 2));
    }
  }
}

std::shared_ptr<const RadialGrid> RadialGrid::make(std::size_t n, Spacing mode,
                                                   double r_min, double r_max) {
  if (n < kMinPoints)
    throw DomainError(fmt::format("grid needs at least {} points, got {}", kMinPoints, n));
  if (!(r_max > r_min))
    throw DomainError("grid requires outer_radius > inner_radius");
  if (mode == Spacing::log_uniform && !(r_min > 0.0))
    throw DomainError("log-uniform grid requires inner_radius > 0");
  std::vector<double> r(n);
  const double last = static_cast<double>(n - 1);
  if (mode == Spacing::uniform) {
    const double h = (r_max - r_min) / last;
    for (std::size_t i = 0; i < n; ++i) r[i] = r_min + h * static_cast<double>(i);
  } else {
    const double step = std::log(r_max / r_min) / last;
    for (std::size_t i = 0; i < n; ++i) r[i] = r_min * std::exp(step * static_cast<double>(i));
  }
  r.front() = r_min;
  r.back() = r_max;
  return from_values(std::move(r), mode);
}

std::shared_ptr<const RadialGrid> RadialGrid::from_values(std::vector<double> r,
                                                          Spacing mode) {
  if (r.size() < kMinPoints)
    throw DomainError(fmt::format("grid needs at least {} points, got {}", kMinPoints,
                                  r.size()));
  for (std::size_t i = 0; i + 1 < r.size(); ++i) {
    if (!(r[i + 1] > r[i]))
      throw DomainError(fmt::format("grid radii not strictly increasing at index {}", i));
  }
  if (mode == Spacing::log_uniform) {
    if (!(r.front() > 0.0)) throw DomainError("log-uniform grid requires inner_radius > 0");
    const double ratio = r[1] / r[0];
    for (std::size_t i = 1; i + 1 < r.size(); ++i) {
      const double q = r[i + 1] / r[i];
      if (std::abs(q - ratio) > 1e-12 * ratio)
        throw DomainError(fmt::format("log-uniform ratio drifts at index {}", i));
    }
  }
  return std::shared_ptr<const RadialGrid>(new RadialGrid(std::move(r), mode));
}

double RadialGrid::min_spacing() const {
  double h = r_[1] - r_[0];
  for (std::size_t i = 1; i + 1 < r_.size(); ++i) h = std::min(h, r_[i + 1] - r_[i]);
  return h;
}

std::vector<double> RadialGrid::differentiate(std::span<const double> f) const {
  std::vector<double> out(size());
  for (std::size_t i = 0; i < size(); ++i) out[i] = d1_[i].apply(f);
  return out;
}

std::vector<double> RadialGrid::differentiate2(std::span<const double> f) const {
  std::vector<double> out(size());
  for (std::size_t i = 0; i < size(); ++i) out[i] = d2_[i].apply(f);
  return out;
}

}  // namespace rdt
