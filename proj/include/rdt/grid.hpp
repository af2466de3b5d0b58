#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

namespace rdt {

/// Dimension of the evolved surfaces.
inline constexpr int kDim = 2;

enum class Spacing { uniform, log_uniform };

Spacing parse_spacing(std::string_view name);
std::string_view to_string(Spacing s);

/// Finite-difference stencil: up to four consecutive points starting at `first`.
struct Stencil {
  std::size_t first = 0;
  std::size_t count = 0;
  std::array<double, 4> weights{};

  double apply(std::span<const double> f) const {
    double acc = 0.0;
    for (std::size_t k = 0; k < count; ++k) acc += weights[k] * f[first + k];
    return acc;
  }
};

/// Weights of the derivative of order `order` at `x0` for an arbitrary node
/// set (Fornberg's recursion). Exact on polynomials of degree < nodes.size().
std::vector<double> fd_weights(double x0, std::span<const double> nodes, int order);

/// Radial chart [inner_radius, outer_radius] sampled at strictly increasing
/// radii. Precomputes second-order first and second derivative stencils:
/// three-point centred in the interior, one-sided at the two ends.
class RadialGrid {
 public:
  static constexpr std::size_t kMinPoints = 16;

  static std::shared_ptr<const RadialGrid> make(std::size_t n, Spacing mode,
                                                double r_min, double r_max);

  /// Adopts explicit radii. Checks ordering and, for log-uniform mode, that the
  /// ratios r[i+1]/r[i] agree to 1e-12 relative.
  static std::shared_ptr<const RadialGrid> from_values(std::vector<double> r,
                                                       Spacing mode);

  std::size_t size() const { return r_.size(); }
  double r(std::size_t i) const { return r_[i]; }
  std::span<const double> values() const { return r_; }
  double inner_radius() const { return r_.front(); }
  double outer_radius() const { return r_.back(); }
  Spacing spacing() const { return mode_; }
  double min_spacing() const;

  const Stencil& first_derivative(std::size_t i) const { return d1_[i]; }
  const Stencil& second_derivative(std::size_t i) const { return d2_[i]; }

  /// d/dr of samples of a scalar function on this grid.
  std::vector<double> differentiate(std::span<const double> f) const;
  std::vector<double> differentiate2(std::span<const double> f) const;

  /// Grids are compared by their radii, bitwise.
  bool same_points(const RadialGrid& other) const { return r_ == other.r_; }

 private:
  RadialGrid(std::vector<double> r, Spacing mode);

  std::vector<double> r_;
  Spacing mode_;
  std::vector<Stencil> d1_;
  std::vector<Stencil> d2_;
};

using GridPtr = std::shared_ptr<const RadialGrid>;

}  // namespace rdt
