#include "rdt/barriers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "rdt/error.hpp"
#include "rdt/tensor.hpp"

namespace rdt {

double CutoffProfile::operator()(double x) const {
  if (x <= 0.0) return 1.0;
  if (x >= 1.0) return 0.0;
  return 1.0 - x * x * x * (10.0 + x * (-15.0 + 6.0 * x));
}

double CutoffProfile::d1(double x) const {
  if (x <= 0.0 || x >= 1.0) return 0.0;
  const double y = x * (1.0 - x);
  return -30.0 * y * y;
}

double CutoffProfile::d2(double x) const {
  if (x <= 0.0 || x >= 1.0) return 0.0;
  return -60.0 * x * (1.0 - x) * (1.0 - 2.0 * x);
}

CutoffAudit audit_cutoff(const CutoffProfile& eta, std::size_t samples, double margin) {
  CutoffAudit out;
  out.samples = samples;
  double prev = eta(-0.5);
  for (std::size_t i = 0; i < samples; ++i) {
    const double x = -0.5 + 2.0 * static_cast<double>(i) / static_cast<double>(samples - 1);
    const double v = eta(x), d1 = eta.d1(x), d2 = eta.d2(x);
    if (v > prev || d1 > 0.0) out.nonincreasing = false;
    prev = v;
    out.max_d2 = std::max(out.max_d2, std::abs(d2));
    if (v > 1e-12) {
      out.max_grad_ratio = std::max(out.max_grad_ratio, d1 * d1 / v);
      out.max_sqrt_ratio = std::max(out.max_sqrt_ratio, -d1 / std::sqrt(v));
    }
  }
  const double f = 1.0 - margin;
  out.pass = out.nonincreasing && out.max_d2 <= f * 8.0 && out.max_grad_ratio <= f * 16.0 &&
             out.max_sqrt_ratio <= f * 4.0;
  return out;
}

CutoffProfile make_eta() {
  CutoffProfile eta;
  const auto audit = audit_cutoff(eta);
  if (!audit.pass)
    throw Error(fmt::format("cutoff profile misses its derivative budget: |eta''| {}, "
                            "|eta'|^2/eta {}",
                            audit.max_d2, audit.max_grad_ratio));
  return eta;
}

BumpFunction::BumpFunction(CutoffProfile eta, BumpVariant variant, double gamma, double delta,
                           int order)
    : eta_(eta), variant_(variant), gamma_(gamma), delta_(delta) {
  if (!(delta > 0.0)) throw DomainError("bump radius delta must be positive");
  if (!(gamma >= 0.0)) throw DomainError("bump radius gamma must be nonnegative");
  switch (variant) {
    case BumpVariant::ball:
      if (delta > 1.0) throw DomainError("ball bump needs delta <= 1");
      offset_ = gamma + delta / 2.0;
      width_ = delta / 4.0;
      break;
    case BumpVariant::neighborhood:
      offset_ = delta / 2.0;
      width_ = delta / 4.0;
      break;
    case BumpVariant::order_m: {
      if (order < 1) throw DomainError("order-m bump needs m >= 1");
      const double m = order;
      offset_ = gamma + delta / (m + 1.0);
      width_ = delta * (0.5 * (1.0 / (m + 1.0) + 1.0 / m) - 1.0 / (m + 1.0));
      break;
    }
  }
}

double BumpFunction::operator()(double d) const { return eta_((d - offset_) / width_); }
double BumpFunction::d1(double d) const { return eta_.d1((d - offset_) / width_) / width_; }
double BumpFunction::d2(double d) const {
  return eta_.d2((d - offset_) / width_) / (width_ * width_);
}

BumpFunction make_xi(const CutoffProfile& eta, BumpVariant variant, double gamma, double delta,
                     int order) {
  return BumpFunction(eta, variant, gamma, delta, order);
}

double z_coth(double z) {
  if (z == 0.0) return 1.0;
  const double az = std::abs(z);
  if (az < 1e-4) {
    const double z2 = z * z;
    return 1.0 + z2 / 3.0 - z2 * z2 / 45.0;
  }
  return z / std::tanh(z);
}

double hessian_comparison_bound(double d, double k0) {
  if (!(d > 0.0)) throw DomainError("distance must be positive");
  if (!(k0 >= 0.0)) throw DomainError("curvature bound k0 must be nonnegative");
  if (k0 == 0.0) return 1.0 / d;
  return z_coth(std::sqrt(std::sqrt(k0)) * d) / d;
}

double xi_hessian_lower_bound(double delta, double d, double k0) {
  return 128.0 / (delta * delta) + 16.0 / delta * hessian_comparison_bound(d, k0);
}

bool coth_linear_check(std::span<const double> samples, double c) {
  for (double z : samples) {
    if (!(z > 0.0)) throw DomainError("coth samples must be positive");
    if (z_coth(z) > 1.0 + c * z) return false;
  }
  return true;
}

double elementary_estimate_bound(double a, double b, double c, double k) {
  if (a < 0.0 || b < 0.0 || c < 0.0) throw DomainError("coefficients must be nonnegative");
  if (!(k >= 3.0)) throw DomainError("term count K must be at least 3");
  const int nonzero = (a > 0.0) + (b > 0.0) + (c > 0.0);
  if (nonzero <= 1) return std::max({a * a, b, std::cbrt(c * c)});
  return std::max({(k * a) * (k * a), k * b, std::cbrt((k * c) * (k * c))});
}

double largest_feasible_x(double a, double b, double c) {
  if (a < 0.0 || b < 0.0 || c < 0.0) throw DomainError("coefficients must be nonnegative");
  const auto p = [&](double y) { return ((y - a) * y - b) * y - c; };
  double lo = 0.0, hi = 1.0 + a + b + c;
  if (c == 0.0) {
    // y = 0 is a root; the positive one solves y^2 - a y - b = 0.
    const double y = 0.5 * (a + std::sqrt(a * a + 4.0 * b));
    return y * y;
  }
  for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    (p(mid) <= 0.0 ? lo : hi) = mid;
  }
  return lo * lo;
}

XiHessianCheck xi_hessian_check(const BackgroundGeometry& bg, const BumpFunction& xi, double k0) {
  const auto& grid = *bg.grid();
  std::vector<double> f(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (std::abs(bg.radial_scale(i) - 1.0) > 1e-12)
      throw DomainError("xi Hessian check needs a unit radial scale");
    f[i] = xi(grid.r(i));
  }
  const TensorField hess = covariant_derivative(TensorField::scalar(bg.grid(), f), bg, 2);
  XiHessianCheck out;
  out.points = grid.size();
  out.min_eigenvalue = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double bound = xi_hessian_lower_bound(xi.delta(), grid.r(i), k0);
    const Sym2& gb = bg.metric()[i];
    const Sym2 h{hess(i, {0, 0}) + bound * gb.rr, 0.5 * (hess(i, {0, 1}) + hess(i, {1, 0})) +
                                                      bound * gb.rt,
                 hess(i, {1, 1}) + bound * gb.tt};
    const auto lam = relative_eigenvalues(h, gb);
    out.min_eigenvalue = std::min(out.min_eigenvalue, std::min(lam[0], lam[1]));
  }
  return out;
}

BarrierParams make_barrier_params(int n) {
  if (n < 2 || n > 8) throw DomainError("barrier constants are tabulated for 2 <= n <= 8");
  std::int64_t p = 1;
  for (int i = 0; i < 10; ++i) p *= n;
  BarrierParams out;
  out.n = n;
  out.m = 25600 * p;
  out.a = 6400 * p;
  out.eps_denominator = 256000 * p;
  out.eps = 1.0 / static_cast<double>(out.eps_denominator);
  return out;
}

ShiConstantAudit shi_constant_audit(int n) {
  ShiConstantAudit out;
  out.params = make_barrier_params(n);
  const double m = static_cast<double>(out.params.m);
  const double eps = out.params.eps;
  const double n3 = static_cast<double>(n) * n * n;
  out.m_eps_identity = out.params.m_eps_is_tenth();
  const double lhs_upper = std::log(10.0 * n3) + std::log(m) + (m - 1.0) * std::log1p(eps);
  const double rhs_upper = 2.0 * std::log(m) - std::log(16.0);
  out.log_margin_upper = rhs_upper - lhs_upper;
  const double decay = (m - 2.0) * std::log1p(-eps);
  out.log_margin_lower = decay - std::log(0.75);
  out.log_margin_lower_direct =
      std::log(m) + std::log(m - 1.0) - std::log(2.0) + decay - (std::log(3.0 / 16.0) + 2.0 * std::log(m));
  out.pass = out.m_eps_identity && out.log_margin_upper >= 0.0 && out.log_margin_lower >= 0.0 &&
             out.log_margin_lower_direct >= 0.0;
  return out;
}

std::vector<BarrierValue> barrier_values(std::span<const std::array<double, 2>> lambdas,
                                         std::span<const double> grad_norm,
                                         const BarrierParams& params) {
  if (lambdas.size() != grad_norm.size()) throw ShapeError("eigenvalue and gradient sizes differ");
  const double m = static_cast<double>(params.m);
  const double lo = 1.0 - 2.0 * params.eps, hi = 1.0 + 2.0 * params.eps;
  std::vector<BarrierValue> out(lambdas.size());
  for (std::size_t p = 0; p < lambdas.size(); ++p) {
    double phi = static_cast<double>(params.a);
    for (double lam : lambdas[p]) {
      if (!(lam >= lo && lam <= hi))
        throw DomainError(fmt::format("eigenvalue {} at point {} is outside the barrier range "
                                      "[{}, {}]",
                                      lam, p, lo, hi));
      phi += std::exp(m * std::log1p(lam - 1.0));
    }
    out[p] = {phi, phi * grad_norm[p] * grad_norm[p]};
  }
  return out;
}

double generalized_barrier(double a0, double lower_norm, double top_norm) {
  return (a0 + lower_norm * lower_norm) * top_norm * top_norm;
}

}  // namespace rdt
