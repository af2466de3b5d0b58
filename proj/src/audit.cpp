#include "rdt/audit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <fmt/format.h>

#include "rdt/error.hpp"

namespace rdt {

std::map<double, double> uniform_equivalence_window(std::vector<EigenRecord> records,
                                                    const std::vector<double>& deltas) {
  std::stable_sort(records.begin(), records.end(),
                   [](const EigenRecord& a, const EigenRecord& b) { return a.t < b.t; });
  std::map<double, double> out;
  for (double delta : deltas) {
    if (!(delta >= 0.0)) throw DomainError("delta must be nonnegative");
    double window = 0.0;
    for (const auto& rec : records) {
      if (!(rec.lambda_min >= 1.0 - delta && rec.lambda_max <= 1.0 + delta)) break;
      window = rec.t;
    }
    out[delta] = window;
  }
  return out;
}

std::map<double, double> uniform_equivalence_window(const std::vector<FlowState>& snapshots,
                                                    const std::vector<double>& deltas) {
  std::vector<EigenRecord> records;
  for (const auto& s : snapshots)
    records.push_back({s.t, s.diagnostics.lambda_min, s.diagnostics.lambda_max});
  return uniform_equivalence_window(std::move(records), deltas);
}

std::vector<double> metric_norm(const TensorField& t, const MetricField& g) {
  if (t.grid() != g.grid() && !t.grid()->same_points(*g.grid()))
    throw ShapeError("tensor and metric live on different grids");
  const std::size_t rank = t.rank();
  const std::size_t cpp = t.components_per_point();
  std::vector<double> out(t.points());
  std::vector<double> cur(cpp), next(cpp);
  for (std::size_t p = 0; p < t.points(); ++p) {
    const Sym2& m = g[p];
    const double l00 = std::sqrt(m.rr);
    const double l10 = m.rt / l00;
    const double l11 = std::sqrt(m.tt - l10 * l10);
    // Lower slots use L^{-1}, upper slots use L^T, with g = L L^T.
    const double lower[2][2] = {{1.0 / l00, 0.0}, {-l10 / (l00 * l11), 1.0 / l11}};
    const double upper[2][2] = {{l00, l10}, {0.0, l11}};
    const auto src = t.point_data(p);
    std::copy(src.begin(), src.end(), cur.begin());
    for (std::size_t s = 0; s < rank; ++s) {
      const auto& mat = t.slots()[s] == Slot::lower ? lower : upper;
      const std::size_t bit = std::size_t{1} << (rank - 1 - s);
      for (std::size_t c = 0; c < cpp; ++c) {
        const int a = (c & bit) ? 1 : 0;
        const std::size_t base = c & ~bit;
        next[c] = mat[a][0] * cur[base] + mat[a][1] * cur[base | bit];
      }
      std::swap(cur, next);
    }
    double sum = 0.0;
    for (double v : cur) sum += v * v;
    out[p] = std::sqrt(sum);
  }
  return out;
}

namespace {

ShellProfile make_profile(std::string quantity, int order, int exponent,
                          const BackgroundGeometry& bg, const std::vector<double>& norms,
                          const ProfileOptions& options) {
  if (!(options.outer_collar >= 0.0 && options.outer_collar < 1.0))
    throw DomainError("outer collar must be in [0,1)");
  ShellProfile prof;
  prof.quantity = std::move(quantity);
  prof.order = order;
  prof.exponent = exponent;
  if (bg.complete()) {
    prof.applicable = false;
    prof.status = "not applicable: complete geometry";
    return prof;
  }
  const auto& grid = *bg.grid();
  const double cut =
      grid.outer_radius() - options.outer_collar * (grid.outer_radius() - grid.inner_radius());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!std::isfinite(bg.rho()[i])) continue;
    if (options.outer_collar > 0.0 && grid.r(i) >= cut) continue;
    prof.rho.push_back(bg.rho()[i]);
    prof.norm.push_back(norms[i]);
  }
  prof.status = "ok";
  return prof;
}

}  // namespace

ShellProfile derivative_profile(const MetricField& g, const BackgroundGeometry& bg, int m,
                                const ProfileOptions& options) {
  if (m < 1) throw DomainError("derivative profile needs order m >= 1");
  if (bg.complete())
    return make_profile("nabla_g", m, m, bg, {}, options);
  const TensorField d = covariant_derivative(TensorField::from_metric(g), bg, m);
  return make_profile("nabla_g", m, m, bg, background_norm(d, bg), options);
}

ShellProfile deturck_norm_audit(const MetricField& g, const BackgroundGeometry& bg,
                                const ProfileOptions& options) {
  if (bg.complete()) return make_profile("deturck", 0, 1, bg, {}, options);
  return make_profile("deturck", 0, 1, bg, background_norm(deturck_vector(g, bg), bg), options);
}

ShellProfile curvature_audit(const MetricField& g, const BackgroundGeometry& bg, int m,
                             const ProfileOptions& options) {
  if (m < 0) throw DomainError("curvature audit order must be nonnegative");
  const std::string name = m == 0 ? "riemann" : "nabla_riemann";
  if (bg.complete()) return make_profile(name, m, m + 2, bg, {}, options);
  TensorField rm = riemann(g);
  if (m > 0) rm = covariant_derivative_of(rm, g, bg, m);
  return make_profile(name, m, m + 2, bg, metric_norm(rm, g), options);
}

ScalingFit scaling_exponent_fit(const ShellProfile& profile, const FitOptions& options) {
  ScalingFit fit;
  fit.quantity = profile.quantity;
  fit.exponent = profile.exponent;
  fit.slack = options.slack;
  if (!profile.applicable) {
    fit.applicable = false;
    return fit;
  }
  if (profile.rho.size() != profile.norm.size()) throw ShapeError("profile columns differ");

  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < profile.rho.size(); ++i)
    if (profile.rho[i] > 0.0 && profile.rho[i] <= options.rho_max) idx.push_back(i);
  std::sort(idx.begin(), idx.end(),
            [&](std::size_t a, std::size_t b) { return profile.rho[a] < profile.rho[b]; });
  if (idx.size() < 4)
    throw DomainError(fmt::format("scaling fit needs at least 4 shells with rho <= {}, got {}",
                                  options.rho_max, idx.size()));
  const double span = profile.rho[idx.back()] / profile.rho[idx.front()];
  if (span < 4.0)
    throw DomainError(fmt::format("scaling fit needs a rho span of at least 4, got {}", span));

  // Tail supremum: the estimate at rho covers every shell farther out.
  std::vector<double> env(idx.size());
  double running = 0.0;
  for (std::size_t j = idx.size(); j-- > 0;) {
    running = std::max(running, profile.norm[idx[j]]);
    env[j] = running;
  }
  std::vector<double> xs, ys;
  for (std::size_t j = 0; j < idx.size(); ++j) {
    fit.rho.push_back(profile.rho[idx[j]]);
    fit.envelope.push_back(env[j]);
    if (env[j] > options.noise_floor) {
      xs.push_back(-std::log(profile.rho[idx[j]]));
      ys.push_back(std::log(env[j]));
    }
  }
  if (xs.size() < 2) {
    fit.degenerate = true;
    fit.pass = true;
    return fit;
  }
  const double n = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t j = 0; j < xs.size(); ++j) {
    sxx += (xs[j] - mx) * (xs[j] - mx);
    sxy += (xs[j] - mx) * (ys[j] - my);
  }
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  for (std::size_t j = 0; j < xs.size(); ++j)
    fit.residual = std::max(fit.residual, std::abs(ys[j] - (fit.intercept + fit.slope * xs[j])));
  fit.pass = fit.slope <= fit.exponent + fit.slack;
  return fit;
}

}  // namespace rdt
