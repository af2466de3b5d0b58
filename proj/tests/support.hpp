#pragma once

// Helpers shared by the test suites: smooth random metric fields and
// interior error measures.

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "rdt/geometry.hpp"
#include "rdt/models.hpp"

namespace rdt::testing {

/// Smooth symmetric perturbation of the background, built in its orthonormal
/// frame: g_hat = I + eps * S(r) with S a sum of random low-frequency modes.
struct RandomSmoothMetric {
  double coeff[3][3];
  double phase[3][3];
  double eps;

  template <class Rng>
  RandomSmoothMetric(Rng& rng, double eps_) : eps(eps_) {
    std::uniform_real_distribution<double> c(-1.0, 1.0), ph(0.0, 6.283185307179586);
    for (auto& row : coeff)
      for (double& v : row) v = c(rng);
    for (auto& row : phase)
      for (double& v : row) v = ph(rng);
  }

  double mode(int comp, double r) const {
    double s = 0.0;
    for (int k = 0; k < 3; ++k) s += coeff[comp][k] * std::sin((k + 1) * r + phase[comp][k]);
    return s / 3.0;
  }

  MetricField on(const BackgroundGeometry& bg) const {
    std::vector<Sym2> g(bg.grid()->size());
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double r = bg.grid()->r(i);
      const double a = bg.radial_scale(i), b = bg.angular_scale(i);
      g[i] = {(1.0 + eps * mode(0, r)) * a * a, eps * mode(1, r) * a * b,
              (1.0 + eps * mode(2, r)) * b * b};
    }
    return {bg.grid(), std::move(g)};
  }
};

/// Max absolute difference over points [skip, n - skip).
inline double interior_max_diff(const TensorField& a, const TensorField& b, std::size_t skip) {
  double e = 0.0;
  const std::size_t cpp = a.components_per_point();
  for (std::size_t p = skip; p + skip < a.points(); ++p)
    for (std::size_t c = 0; c < cpp; ++c) e = std::max(e, std::abs(a.at(p, c) - b.at(p, c)));
  return e;
}

inline double interior_max(const std::vector<double>& v, std::size_t skip) {
  double e = 0.0;
  for (std::size_t p = skip; p + skip < v.size(); ++p) e = std::max(e, std::abs(v[p]));
  return e;
}

inline std::shared_ptr<const BackgroundGeometry> background(GeometryKind kind, std::size_t n,
                                                            Spacing mode, double r0, double r1,
                                                            double beta = 1.0,
                                                            double amplitude = 0.0) {
  GeometrySpec spec;
  spec.kind = kind;
  spec.beta = beta;
  spec.amplitude = amplitude;
  return instantiate(spec, RadialGrid::make(n, mode, r0, r1));
}

}  // namespace rdt::testing
