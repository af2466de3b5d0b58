#include "rdt/tensor.hpp"

#include <algorithm>

#include "rdt/error.hpp"

namespace rdt {

std::array<double, 2> eigenvalues(const Sym2& m) {
  const double mean = 0.5 * (m.rr + m.tt);
  const double half_gap = 0.5 * (m.rr - m.tt);
  const double radius = std::hypot(half_gap, m.rt);
  return {mean - radius, mean + radius};
}

std::array<double, 2> relative_eigenvalues(const Sym2& g, const Sym2& g_bg) {
  // Cholesky of the background, then eigenvalues of L^{-1} g L^{-T}.
  const double l11 = std::sqrt(g_bg.rr);
  const double l21 = g_bg.rt / l11;
  const double l22 = std::sqrt(g_bg.tt - l21 * l21);
  const double a = g.rr / (l11 * l11);
  const double b = (g.rt - l21 * g.rr / l11) / (l11 * l22);
  const double c =
      (g.tt - 2.0 * l21 * g.rt / l11 + l21 * l21 * g.rr / (l11 * l11)) / (l22 * l22);
  return eigenvalues({a, b, c});
}

MetricField::MetricField(GridPtr grid, std::vector<Sym2> components)
    : grid_(std::move(grid)), components_(std::move(components)) {
  if (!grid_ || grid_->size() != components_.size())
    throw ShapeError("metric component count does not match grid size");
}

void MetricField::require_spd(double floor) const {
  for (std::size_t i = 0; i < components_.size(); ++i) {
    const double lo = eigenvalues(components_[i])[0];
    if (!(lo > floor)) throw DefinitenessError(i, lo);
  }
}

MetricField MetricField::scaled(double c) const {
  std::vector<Sym2> out(components_.size());
  std::transform(components_.begin(), components_.end(), out.begin(),
                 [c](const Sym2& s) { return c * s; });
  return {grid_, std::move(out)};
}

TensorField::TensorField(GridPtr grid, std::vector<Slot> slots)
    : grid_(std::move(grid)), slots_(std::move(slots)) {
  data_.assign(points() * components_per_point(), 0.0);
}

TensorField TensorField::scalar(GridPtr grid, std::span<const double> values) {
  TensorField t(std::move(grid), {});
  if (values.size() != t.points()) throw ShapeError("scalar field size does not match grid");
  std::copy(values.begin(), values.end(), t.data_.begin());
  return t;
}

TensorField TensorField::from_metric(const MetricField& g) {
  TensorField t(g.grid(), {Slot::lower, Slot::lower});
  for (std::size_t p = 0; p < g.size(); ++p) {
    auto d = t.point_data(p);
    d[0] = g[p].rr;
    d[1] = g[p].rt;
    d[2] = g[p].rt;
    d[3] = g[p].tt;
  }
  return t;
}

int TensorField::covariant() const {
  return static_cast<int>(std::count(slots_.begin(), slots_.end(), Slot::lower));
}

int TensorField::contravariant() const {
  return static_cast<int>(std::count(slots_.begin(), slots_.end(), Slot::upper));
}

std::size_t TensorField::flat_index(std::initializer_list<int> index) {
  std::size_t flat = 0;
  for (int i : index) flat = 2 * flat + static_cast<std::size_t>(i);
  return flat;
}

void TensorField::require_compatible(const TensorField& o) const {
  if (slots_ != o.slots_) throw ShapeError("tensor valences differ");
  if (grid_ != o.grid_ && !(grid_ && o.grid_ && grid_->same_points(*o.grid_)))
    throw ShapeError("tensors live on different grids");
}

TensorField& TensorField::operator+=(const TensorField& o) {
  require_compatible(o);
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
  return *this;
}

TensorField& TensorField::operator-=(const TensorField& o) {
  require_compatible(o);
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
  return *this;
}

TensorField& TensorField::operator*=(double c) {
  for (double& v : data_) v *= c;
  return *this;
}

double TensorField::max_abs() const {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace rdt
