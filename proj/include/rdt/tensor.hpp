#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include "rdt/grid.hpp"

namespace rdt {

/// Symmetric 2x2 matrix in (r, theta) coordinates.
struct Sym2 {
  double rr = 0.0;
  double rt = 0.0;
  double tt = 0.0;

  double operator()(int i, int j) const {
    if (i != j) return rt;
    return i == 0 ? rr : tt;
  }
  double det() const { return rr * tt - rt * rt; }
  double trace() const { return rr + tt; }
  Sym2 inverse() const {
    const double d = det();
    return {tt / d, -rt / d, rr / d};
  }

  friend Sym2 operator+(Sym2 a, const Sym2& b) { return {a.rr + b.rr, a.rt + b.rt, a.tt + b.tt}; }
  friend Sym2 operator-(Sym2 a, const Sym2& b) { return {a.rr - b.rr, a.rt - b.rt, a.tt - b.tt}; }
  friend Sym2 operator*(double c, const Sym2& a) { return {c * a.rr, c * a.rt, c * a.tt}; }
  friend bool operator==(const Sym2&, const Sym2&) = default;
};

/// Eigenvalues of a symmetric 2x2 matrix, ascending.
std::array<double, 2> eigenvalues(const Sym2& m);

/// Roots of det(g - lambda * g_bg) = 0, ascending. Requires g_bg SPD.
std::array<double, 2> relative_eigenvalues(const Sym2& g, const Sym2& g_bg);

/// Symmetric 2-tensor sampled on a radial grid (coordinate components g_ij).
class MetricField {
 public:
  MetricField() = default;
  MetricField(GridPtr grid, std::vector<Sym2> components);

  const GridPtr& grid() const { return grid_; }
  std::size_t size() const { return components_.size(); }
  const Sym2& operator[](std::size_t i) const { return components_[i]; }
  Sym2& operator[](std::size_t i) { return components_[i]; }
  std::span<const Sym2> components() const { return components_; }
  std::span<Sym2> components() { return components_; }

  /// Throws DefinitenessError at the first point whose smaller eigenvalue is
  /// below `floor`.
  void require_spd(double floor = 1e-12) const;

  MetricField scaled(double c) const;

 private:
  GridPtr grid_;
  std::vector<Sym2> components_;
};

enum class Slot { lower, upper };

/// Tensor of arbitrary valence on a radial grid. Index slots are ordered;
/// components are stored point-major, row-major over slots (dimension 2).
class TensorField {
 public:
  TensorField() = default;
  TensorField(GridPtr grid, std::vector<Slot> slots);

  static TensorField scalar(GridPtr grid, std::span<const double> values);
  static TensorField from_metric(const MetricField& g);

  const GridPtr& grid() const { return grid_; }
  std::size_t points() const { return grid_ ? grid_->size() : 0; }
  std::size_t rank() const { return slots_.size(); }
  const std::vector<Slot>& slots() const { return slots_; }
  std::size_t components_per_point() const { return std::size_t{1} << slots_.size(); }

  int covariant() const;
  int contravariant() const;

  double& at(std::size_t point, std::size_t component) {
    return data_[point * components_per_point() + component];
  }
  double at(std::size_t point, std::size_t component) const {
    return data_[point * components_per_point() + component];
  }
  double& operator()(std::size_t point, std::initializer_list<int> index) {
    return at(point, flat_index(index));
  }
  double operator()(std::size_t point, std::initializer_list<int> index) const {
    return at(point, flat_index(index));
  }

  std::span<const double> point_data(std::size_t point) const {
    return {data_.data() + point * components_per_point(), components_per_point()};
  }
  std::span<double> point_data(std::size_t point) {
    return {data_.data() + point * components_per_point(), components_per_point()};
  }
  std::span<const double> data() const { return data_; }
  std::span<double> data() { return data_; }

  static std::size_t flat_index(std::initializer_list<int> index);

  TensorField& operator+=(const TensorField& o);
  TensorField& operator-=(const TensorField& o);
  TensorField& operator*=(double c);
  friend TensorField operator+(TensorField a, const TensorField& b) { return a += b; }
  friend TensorField operator-(TensorField a, const TensorField& b) { return a -= b; }
  friend TensorField operator*(double c, TensorField a) { return a *= c; }

  /// Largest absolute component over all points.
  double max_abs() const;

 private:
  void require_compatible(const TensorField& o) const;

  GridPtr grid_;
  std::vector<Slot> slots_;
  std::vector<double> data_;
};

}  // namespace rdt
