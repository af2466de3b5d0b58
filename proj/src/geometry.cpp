#include "rdt/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include <fmt/format.h>

#include "local_geometry.hpp"
#include "rdt/error.hpp"

namespace rdt {

namespace {

int slot_bit(std::size_t component, std::size_t slot, std::size_t rank) {
  return static_cast<int>((component >> (rank - 1 - slot)) & 1U);
}

// Factor turning coordinate components into frame components at one point.
double to_frame_factor(const std::vector<Slot>& slots, std::size_t component, double a,
                       double b) {
  double f = 1.0;
  const std::size_t rank = slots.size();
  for (std::size_t s = 0; s < rank; ++s) {
    const double scale = slot_bit(component, s, rank) == 0 ? a : b;
    f *= slots[s] == Slot::lower ? 1.0 / scale : scale;
  }
  return f;
}

void require_same_grid(const GridPtr& a, const GridPtr& b) {
  if (a != b && !(a && b && a->same_points(*b)))
    throw ShapeError("fields live on different grids");
}

}  // namespace

BackgroundGeometry::BackgroundGeometry(GridPtr grid, WarpedProfile profile,
                                       std::vector<double> rho)
    : grid_(std::move(grid)), profile_(std::move(profile)), rho_(std::move(rho)) {
  const std::size_t n = grid_->size();
  if (rho_.size() != n) throw ShapeError("distance data does not match grid size");
  radial_.resize(n);
  angular_.resize(n);
  rotation_.resize(n);
  curvature_.resize(n);
  std::vector<Sym2> g(n);
  christoffel_ = TensorField(grid_, {Slot::upper, Slot::lower, Slot::lower});
  riemann_ = TensorField(grid_, {Slot::lower, Slot::lower, Slot::lower, Slot::lower});
  for (std::size_t i = 0; i < n; ++i) {
    const double r = grid_->r(i);
    const Jet a = profile_.radial(r);
    const Jet b = profile_.angular(r);
    if (!(a.value > 0.0) || !(b.value > 0.0))
      throw DefinitenessError(i, std::min(a.value, b.value));
    radial_[i] = a.value;
    angular_[i] = b.value;
    rotation_[i] = b.d1 / (a.value * b.value);
    g[i] = {a.value * a.value, 0.0, b.value * b.value};
    christoffel_(i, {0, 0, 0}) = a.d1 / a.value;
    christoffel_(i, {0, 1, 1}) = -b.value * b.d1 / (a.value * a.value);
    christoffel_(i, {1, 0, 1}) = b.d1 / b.value;
    christoffel_(i, {1, 1, 0}) = b.d1 / b.value;
    const double k = -(b.d2 * a.value - b.d1 * a.d1) / (a.value * a.value * a.value * b.value);
    curvature_[i] = k;
    const double det = g[i].det();
    riemann_(i, {0, 1, 0, 1}) = k * det;
    riemann_(i, {1, 0, 1, 0}) = k * det;
    riemann_(i, {0, 1, 1, 0}) = -k * det;
    riemann_(i, {1, 0, 0, 1}) = -k * det;
    k0_ = std::max(k0_, 4.0 * k * k);
  }
  metric_ = MetricField(grid_, std::move(g));
  metric_.require_spd();

  const auto curvature_norm = background_norm(riemann_, *this);
  TensorField derivative = riemann_;
  for (int s = 0; s <= 2; ++s) {
    if (s > 0) derivative = covariant_derivative(derivative, *this, 1);
    const auto norms = s == 0 ? curvature_norm : background_norm(derivative, *this);
    double sup = 0.0, weighted = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      sup = std::max(sup, norms[i]);
      if (std::isfinite(rho_[i])) weighted = std::max(weighted, std::pow(rho_[i], s) * norms[i]);
    }
    if (s > 0) derivative_bounds_[s] = sup;
    if (!complete()) weighted_bounds_[s] = weighted;
  }
}

bool BackgroundGeometry::complete() const {
  return std::all_of(rho_.begin(), rho_.end(), [](double r) { return std::isinf(r); });
}

TensorField christoffel(const MetricField& g) {
  g.require_spd();
  TensorField out(g.grid(), {Slot::upper, Slot::lower, Slot::lower});
  for (std::size_t p = 0; p < g.size(); ++p) {
    detail::LocalGeometry lg;
    detail::christoffel_jet(detail::metric_jet(g, p), lg);
    for (int k = 0; k < 2; ++k)
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) out(p, {k, i, j}) = lg.gamma[k][i][j];
  }
  return out;
}

std::vector<double> frame_components(const TensorField& t, const BackgroundGeometry& bg) {
  require_same_grid(t.grid(), bg.grid());
  const std::size_t cpp = t.components_per_point();
  std::vector<double> out(t.data().begin(), t.data().end());
  for (std::size_t p = 0; p < t.points(); ++p) {
    const double a = bg.radial_scale(p);
    const double b = bg.angular_scale(p);
    for (std::size_t c = 0; c < cpp; ++c)
      out[p * cpp + c] *= to_frame_factor(t.slots(), c, a, b);
  }
  return out;
}

TensorField covariant_derivative(const TensorField& t, const BackgroundGeometry& bg, int order) {
  if (order < 1) throw DomainError("covariant derivative order must be >= 1");
  require_same_grid(t.grid(), bg.grid());
  if (order > 1) return covariant_derivative(covariant_derivative(t, bg, 1), bg, order - 1);

  const RadialGrid& grid = *t.grid();
  const std::size_t n = grid.size();
  const std::size_t rank = t.rank();
  const std::size_t cpp = t.components_per_point();
  const std::vector<double> frame = frame_components(t, bg);

  std::vector<Slot> slots{Slot::lower};
  slots.insert(slots.end(), t.slots().begin(), t.slots().end());
  TensorField out(t.grid(), std::move(slots));

  for (std::size_t p = 0; p < n; ++p) {
    const double a = bg.radial_scale(p);
    const double b = bg.angular_scale(p);
    const double omega = bg.rotation_rate(p);
    const Stencil& st = grid.first_derivative(p);
    for (std::size_t c = 0; c < cpp; ++c) {
      // Radial direction: the frame is parallel, so differentiate components.
      double radial = 0.0;
      for (std::size_t k = 0; k < st.count; ++k)
        radial += st.weights[k] * frame[(st.first + k) * cpp + c];
      // Angular direction: rotation generator acting on every slot.
      double angular = 0.0;
      for (std::size_t s = 0; s < rank; ++s) {
        const std::size_t bit = std::size_t{1} << (rank - 1 - s);
        const std::size_t flipped = c ^ bit;
        angular += (c & bit) ? omega * frame[p * cpp + flipped] : -omega * frame[p * cpp + flipped];
      }
      const double back = 1.0 / to_frame_factor(t.slots(), c, a, b);
      // d_r of frame components equals the coordinate r-slot times 1; the
      // theta slot picks up the factor B from e_theta = d_theta / B.
      out.at(p, c) = radial * back;
      out.at(p, cpp + c) = angular * b * back;
    }
  }
  return out;
}

TensorField christoffel_difference(const MetricField& g, const BackgroundGeometry& bg) {
  require_same_grid(g.grid(), bg.grid());
  g.require_spd();
  const TensorField dg = covariant_derivative(TensorField::from_metric(g), bg, 1);
  TensorField out(g.grid(), {Slot::upper, Slot::lower, Slot::lower});
  for (std::size_t p = 0; p < g.size(); ++p) {
    const Sym2 inv = g[p].inverse();
    for (int k = 0; k < 2; ++k)
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
          double v = 0.0;
          for (int m = 0; m < 2; ++m)
            v += inv(k, m) * (dg(p, {j, i, m}) + dg(p, {i, j, m}) - dg(p, {m, i, j}));
          out(p, {k, i, j}) = 0.5 * v;
        }
  }
  return out;
}

TensorField deturck_vector(const MetricField& g, const BackgroundGeometry& bg) {
  const TensorField diff = christoffel_difference(g, bg);
  TensorField v(g.grid(), {Slot::upper});
  for (std::size_t p = 0; p < g.size(); ++p) {
    const Sym2 inv = g[p].inverse();
    for (int k = 0; k < 2; ++k) {
      double acc = 0.0;
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) acc += inv(i, j) * diff(p, {k, i, j});
      v(p, {k}) = acc;
    }
  }
  return v;
}

TensorField riemann(const MetricField& g) {
  g.require_spd();
  TensorField out(g.grid(), {Slot::lower, Slot::lower, Slot::lower, Slot::lower});
  for (std::size_t p = 0; p < g.size(); ++p) {
    const detail::LocalGeometry lg = detail::local_geometry(detail::metric_jet(g, p));
    for (int r = 0; r < 2; ++r)
      for (int s = 0; s < 2; ++s)
        for (int mu = 0; mu < 2; ++mu)
          for (int nu = 0; nu < 2; ++nu) {
            double v = 0.0;
            for (int l = 0; l < 2; ++l) v += lg.g[r][l] * lg.riemann_up[l][s][mu][nu];
            out(p, {r, s, mu, nu}) = v;
          }
  }
  return out;
}

TensorField ricci(const MetricField& g) {
  g.require_spd();
  TensorField out(g.grid(), {Slot::lower, Slot::lower});
  for (std::size_t p = 0; p < g.size(); ++p) {
    const detail::LocalGeometry lg = detail::local_geometry(detail::metric_jet(g, p));
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) out(p, {i, j}) = lg.ricci[i][j];
  }
  return out;
}

std::vector<double> scalar_curvature(const MetricField& g) {
  const TensorField ric = ricci(g);
  std::vector<double> out(g.size());
  for (std::size_t p = 0; p < g.size(); ++p) {
    const Sym2 inv = g[p].inverse();
    double acc = 0.0;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) acc += inv(i, j) * ric(p, {i, j});
    out[p] = acc;
  }
  return out;
}

TensorField covariant_derivative_of(const TensorField& t, const MetricField& g,
                                    const BackgroundGeometry& bg, int order) {
  if (order < 1) throw DomainError("covariant derivative order must be >= 1");
  if (order > 1)
    return covariant_derivative_of(covariant_derivative_of(t, g, bg, 1), g, bg, order - 1);
  // nabla_a T = tilde-nabla_a T - C^l_{a i} T_{..l..} + C^i_{a l} T^{..l..}
  const TensorField diff = christoffel_difference(g, bg);
  TensorField out = covariant_derivative(t, bg, 1);
  const std::size_t rank = t.rank();
  const std::size_t cpp = t.components_per_point();
  for (std::size_t p = 0; p < t.points(); ++p) {
    for (int a = 0; a < 2; ++a)
      for (std::size_t c = 0; c < cpp; ++c) {
        double corr = 0.0;
        for (std::size_t s = 0; s < rank; ++s) {
          const std::size_t bit = std::size_t{1} << (rank - 1 - s);
          const int idx = (c & bit) ? 1 : 0;
          for (int l = 0; l < 2; ++l) {
            const std::size_t replaced = l == 1 ? (c | bit) : (c & ~bit);
            if (t.slots()[s] == Slot::lower)
              corr -= diff(p, {l, a, idx}) * t.at(p, replaced);
            else
              corr += diff(p, {idx, a, l}) * t.at(p, replaced);
          }
        }
        out.at(p, static_cast<std::size_t>(a) * cpp + c) += corr;
      }
  }
  return out;
}

std::vector<double> background_norm(const TensorField& t, const BackgroundGeometry& bg) {
  const std::vector<double> frame = frame_components(t, bg);
  const std::size_t cpp = t.components_per_point();
  std::vector<double> out(t.points());
  for (std::size_t p = 0; p < t.points(); ++p) {
    double acc = 0.0;
    for (std::size_t c = 0; c < cpp; ++c) acc += frame[p * cpp + c] * frame[p * cpp + c];
    out[p] = std::sqrt(acc);
  }
  return out;
}

std::vector<std::array<double, 2>> relative_eigenvalues(const MetricField& g,
                                                        const BackgroundGeometry& bg) {
  require_same_grid(g.grid(), bg.grid());
  g.require_spd();
  std::vector<std::array<double, 2>> out(g.size());
  for (std::size_t p = 0; p < g.size(); ++p) {
    out[p] = relative_eigenvalues(g[p], bg.metric()[p]);
    if (!(out[p][0] > 1e-12)) throw DefinitenessError(p, out[p][0]);
  }
  return out;
}

bool star_bound_holds(std::span<const double> a, int rank_a, std::span<const double> b,
                      int rank_b, const Contraction& pairs, int n) {
  if (n < 1) throw ShapeError("dimension must be positive");
  std::vector<bool> used_a(rank_a, false), used_b(rank_b, false);
  for (const auto& [sa, sb] : pairs) {
    if (sa < 0 || sa >= rank_a || sb < 0 || sb >= rank_b || used_a[sa] || used_b[sb])
      throw ShapeError(fmt::format("malformed contraction pair ({}, {})", sa, sb));
    used_a[sa] = used_b[sb] = true;
  }
  auto ipow = [](int base, int e) {
    std::size_t v = 1;
    for (int k = 0; k < e; ++k) v *= static_cast<std::size_t>(base);
    return v;
  };
  const std::size_t size_a = ipow(n, rank_a), size_b = ipow(n, rank_b);
  if (a.size() != size_a || b.size() != size_b) throw ShapeError("component count mismatch");

  auto digits = [n](std::size_t flat, int rank) {
    std::vector<int> d(rank);
    for (int s = rank - 1; s >= 0; --s) {
      d[s] = static_cast<int>(flat % n);
      flat /= n;
    }
    return d;
  };
  const int pair_count = static_cast<int>(pairs.size());
  const int free_rank = rank_a + rank_b - 2 * pair_count;
  std::vector<double> product(ipow(n, free_rank), 0.0);
  for (std::size_t ia = 0; ia < size_a; ++ia) {
    const auto da = digits(ia, rank_a);
    for (std::size_t ib = 0; ib < size_b; ++ib) {
      const auto db = digits(ib, rank_b);
      bool match = true;
      for (const auto& [sa, sb] : pairs) match = match && da[sa] == db[sb];
      if (!match) continue;
      std::size_t flat = 0;
      for (int s = 0; s < rank_a; ++s)
        if (!used_a[s]) flat = flat * n + static_cast<std::size_t>(da[s]);
      for (int s = 0; s < rank_b; ++s)
        if (!used_b[s]) flat = flat * n + static_cast<std::size_t>(db[s]);
      product[flat] += a[ia] * b[ib];
    }
  }
  auto norm = [](std::span<const double> v) {
    double acc = 0.0;
    for (double x : v) acc += x * x;
    return std::sqrt(acc);
  };
  const double bound = static_cast<double>(ipow(n, pair_count)) * norm(a) * norm(b);
  return norm(product) <= bound * (1.0 + 1e-12);
}

bool star_bound_check(const TensorField& a, const TensorField& b, const Contraction& pairs,
                      const BackgroundGeometry& bg) {
  const std::vector<double> fa = frame_components(a, bg);
  const std::vector<double> fb = frame_components(b, bg);
  const std::size_t ca = a.components_per_point(), cb = b.components_per_point();
  for (std::size_t p = 0; p < a.points(); ++p) {
    const std::span<const double> sa(fa.data() + p * ca, ca);
    const std::span<const double> sb(fb.data() + p * cb, cb);
    if (!star_bound_holds(sa, static_cast<int>(a.rank()), sb, static_cast<int>(b.rank()), pairs,
                          kDim))
      return false;
  }
  return true;
}

}  // namespace rdt
