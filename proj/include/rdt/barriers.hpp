#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "rdt/geometry.hpp"

namespace rdt {

/// Nonincreasing cutoff: 1 on (-inf, 0], 0 on [1, inf), quintic smoothstep
/// in between.
class CutoffProfile {
 public:
  double operator()(double x) const;
  double d1(double x) const;
  double d2(double x) const;
};

struct CutoffAudit {
  std::size_t samples = 0;
  double max_d2 = 0.0;              // max |eta''|
  double max_grad_ratio = 0.0;      // max |eta'|^2 / eta over {eta > 1e-12}
  double max_sqrt_ratio = 0.0;      // max -eta' / sqrt(eta) over {eta > 1e-12}
  bool nonincreasing = true;
  bool pass = false;                // all three budgets hold with the margin
};

/// Samples eta on a uniform grid over [-0.5, 1.5]. margin = 0.05 asks for
/// max |eta''| <= 0.95 * 8 and so on.
CutoffAudit audit_cutoff(const CutoffProfile& eta, std::size_t samples = 100000,
                         double margin = 0.05);

/// Returns the profile; throws if the construction-time audit fails.
CutoffProfile make_eta();

enum class BumpVariant { ball, neighborhood, order_m };

/// xi = eta((d - offset) / width) as a function of the distance d to the
/// center point (ball, order_m) or to the base set (neighborhood).
class BumpFunction {
 public:
  BumpFunction(CutoffProfile eta, BumpVariant variant, double gamma, double delta, int order = 1);

  double operator()(double d) const;
  double d1(double d) const;  // d xi / d d
  double d2(double d) const;

  BumpVariant variant() const { return variant_; }
  double gamma() const { return gamma_; }
  double delta() const { return delta_; }
  double offset() const { return offset_; }
  double width() const { return width_; }
  double plateau_radius() const { return offset_; }
  double support_radius() const { return offset_ + width_; }
  /// 256 / delta^2 for the ball variant, 16 / width^2 in general.
  double gradient_budget() const { return 16.0 / (width_ * width_); }

 private:
  CutoffProfile eta_;
  BumpVariant variant_;
  double gamma_, delta_;
  double offset_, width_;
};

BumpFunction make_xi(const CutoffProfile& eta, BumpVariant variant, double gamma, double delta,
                     int order = 1);

/// k0^{1/4} coth(k0^{1/4} d); 1/d when k0 = 0.
double hessian_comparison_bound(double d, double k0);

/// 128/delta^2 + (16/delta) hessian_comparison_bound(d, k0): Hess xi is
/// bounded below by minus this multiple of the background metric.
double xi_hessian_lower_bound(double delta, double d, double k0);

/// z coth z, accurate for small z.
double z_coth(double z);

/// z coth z <= 1 + c z on every sample.
bool coth_linear_check(std::span<const double> samples, double c = 1.0);

/// Upper bound on x >= 0 with x^2 <= a x^{3/2} + b x + c x^{1/2}:
/// max{(Ka)^2, Kb, (Kc)^{2/3}}, or max{a^2, b, c^{2/3}} when at most one
/// coefficient is nonzero.
double elementary_estimate_bound(double a, double b, double c, double k = 3.0);

/// Largest x >= 0 with x^2 <= a x^{3/2} + b x + c x^{1/2}, by bisection on the
/// cubic y^3 - a y^2 - b y - c in y = sqrt(x).
double largest_feasible_x(double a, double b, double c);

struct XiHessianCheck {
  /// min over grid points of the smallest eigenvalue of
  /// Hess xi + xi_hessian_lower_bound(delta, d, k0) g_bg relative to g_bg.
  double min_eigenvalue = 0.0;
  std::size_t points = 0;
};

/// Evaluates the ball bump centered at r = 0 with finite-difference
/// covariant derivatives. Needs a unit radial scale, so that d = r.
XiHessianCheck xi_hessian_check(const BackgroundGeometry& bg, const BumpFunction& xi, double k0);

struct BarrierParams {
  int n = 2;
  std::int64_t m = 0;   // 25600 n^10
  std::int64_t a = 0;   // 6400 n^10
  double eps = 0.0;     // 1 / (256000 n^10)
  std::int64_t eps_denominator = 0;

  /// m * eps = 1/10 as an integer identity.
  bool m_eps_is_tenth() const { return 10 * m == eps_denominator; }
};

BarrierParams make_barrier_params(int n);

struct ShiConstantAudit {
  BarrierParams params;
  bool m_eps_identity = false;
  /// log(m^2/16) - log(10 n^3 m (1+eps)^{m-1}).
  double log_margin_upper = 0.0;
  /// log((1-eps)^{m-2}) - log(3/4): covers m(m-1)/2 (1-eps)^{m-2} >= m^2/4 (1-eps)^{m-2} >= 3m^2/16.
  double log_margin_lower = 0.0;
  /// log(m(m-1)/2 (1-eps)^{m-2}) - log(3 m^2 / 16).
  double log_margin_lower_direct = 0.0;
  bool pass = false;
};

ShiConstantAudit shi_constant_audit(int n);

struct BarrierValue {
  double phi = 0.0;
  double psi = 0.0;
};

/// phi = a + sum_k lambda_k^m and psi = phi |nabla g|^2, with lambda^m taken
/// as exp(m log lambda). Eigenvalues outside [1 - 2 eps, 1 + 2 eps] throw.
std::vector<BarrierValue> barrier_values(std::span<const std::array<double, 2>> lambdas,
                                         std::span<const double> grad_norm,
                                         const BarrierParams& params);

/// (a0 + |nabla^{m-1} g|^2) |nabla^m g|^2.
double generalized_barrier(double a0, double lower_norm, double top_norm);

}  // namespace rdt
