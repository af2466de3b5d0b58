#include "rdt/flow.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "local_geometry.hpp"
#include "rdt/error.hpp"

namespace rdt {

void StepControl::validate() const {
  if (!(cfl_fraction > 0.0 && cfl_fraction <= 1.0))
    throw DomainError("cfl_fraction must be in (0,1]");
  if (!(max_dt > 0.0)) throw DomainError("max_dt must be positive");
  if (!(t_final >= 0.0)) throw DomainError("t_final must be nonnegative");
  if (!(snapshot_interval >= 0.0)) throw DomainError("snapshot_interval must be nonnegative");
}

namespace {

// Forward-mode pair (value, d/dr).
struct Dual {
  double v = 0.0;
  double d = 0.0;
};
Dual operator+(Dual a, Dual b) { return {a.v + b.v, a.d + b.d}; }
Dual operator-(Dual a, Dual b) { return {a.v - b.v, a.d - b.d}; }
Dual operator*(Dual a, Dual b) { return {a.v * b.v, a.d * b.v + a.v * b.d}; }
Dual operator*(double c, Dual a) { return {c * a.v, c * a.d}; }
Dual operator/(Dual a, Dual b) { return {a.v / b.v, (a.d * b.v - a.v * b.d) / (b.v * b.v)}; }

// De Turck vector in the background orthonormal frame from the frame
// components P of g and their radial derivative dP. Frame derivatives:
// along e_r the frame is parallel, along e_theta it rotates at rate w.
void frame_deturck(const Dual (&P)[2][2], const Dual (&dP)[2][2], Dual A, Dual w, Dual (&V)[2]) {
  Dual T[2][2][2];
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) T[0][a][b] = dP[a][b] / A;
  T[1][0][0] = -2.0 * (w * P[1][0]);
  T[1][0][1] = w * (P[0][0] - P[1][1]);
  T[1][1][0] = T[1][0][1];
  T[1][1][1] = 2.0 * (w * P[0][1]);
  const Dual det = P[0][0] * P[1][1] - P[0][1] * P[1][0];
  const Dual inv[2][2] = {{P[1][1] / det, Dual{} - P[0][1] / det},
                          {Dual{} - P[1][0] / det, P[0][0] / det}};
  for (int k = 0; k < 2; ++k) {
    Dual acc;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        Dual c;
        for (int m = 0; m < 2; ++m) c = c + inv[k][m] * (T[j][i][m] + T[i][j][m] - T[m][i][j]);
        acc = acc + inv[i][j] * (0.5 * c);
      }
    V[k] = acc;
  }
}

}  // namespace

FlowEngine::FlowEngine(std::shared_ptr<const BackgroundGeometry> bg) : bg_(std::move(bg)) {
  const RadialGrid& grid = *bg_->grid();
  const std::size_t n = grid.size();
  frame_.resize(n);
  for (std::size_t p = 0; p < n; ++p) {
    const Jet a = bg_->profile().radial(grid.r(p));
    const Jet b = bg_->profile().angular(grid.r(p));
    const double w = b.d1 / (a.value * b.value);
    const double dw = b.d2 / (a.value * b.value) -
                      b.d1 * (a.d1 * b.value + a.value * b.d1) / std::pow(a.value * b.value, 2);
    frame_[p] = {bg_->radial_scale(p), a.d1, bg_->angular_scale(p), b.d1, w, dw};
  }
}

void FlowEngine::rhs(std::span<const Sym2> g, std::span<Sym2> out) const {
  const RadialGrid& grid = *bg_->grid();
  const std::size_t n = grid.size();
  // Frame components of g; exactly the identity where g equals the background.
  std::vector<Sym2> hat(n);
  for (std::size_t p = 0; p < n; ++p) {
    const double a = frame_[p].a, b = frame_[p].b;
    hat[p] = {g[p].rr / (a * a), g[p].rt / (a * b), g[p].tt / (b * b)};
  }
  for (std::size_t p = 0; p < n; ++p) {
    const Stencil& s1 = grid.first_derivative(p);
    const Stencil& s2 = grid.second_derivative(p);
    detail::MetricJet jet;
    jet.g = g[p];
    Sym2 dhat, ddhat;
    for (std::size_t k = 0; k < s1.count; ++k) {
      jet.dg = jet.dg + s1.weights[k] * g[s1.first + k];
      dhat = dhat + s1.weights[k] * hat[s1.first + k];
    }
    for (std::size_t k = 0; k < s2.count; ++k) {
      jet.ddg = jet.ddg + s2.weights[k] * g[s2.first + k];
      ddhat = ddhat + s2.weights[k] * hat[s2.first + k];
    }
    const detail::LocalGeometry lg = detail::local_geometry(jet);
    detail::Array2 dg;
    detail::to_array(jet.dg, dg);

    const FramePoint& f = frame_[p];
    const Dual P[2][2] = {{{hat[p].rr, dhat.rr}, {hat[p].rt, dhat.rt}},
                          {{hat[p].rt, dhat.rt}, {hat[p].tt, dhat.tt}}};
    const Dual dP[2][2] = {{{dhat.rr, ddhat.rr}, {dhat.rt, ddhat.rt}},
                           {{dhat.rt, ddhat.rt}, {dhat.tt, ddhat.tt}}};
    Dual vhat[2];
    frame_deturck(P, dP, {f.a, f.da}, {f.w, f.dw}, vhat);
    const Dual vr = vhat[0] / Dual{f.a, f.da};
    const Dual vt = vhat[1] / Dual{f.b, f.db};
    const double v_up[2] = {vr.v, vt.v};
    const double dv_up[2] = {vr.d, vt.d};

    double v_lo[2], dv_lo[2];
    for (int j = 0; j < 2; ++j) {
      v_lo[j] = lg.g[j][0] * v_up[0] + lg.g[j][1] * v_up[1];
      dv_lo[j] = dg[j][0] * v_up[0] + dg[j][1] * v_up[1] + lg.g[j][0] * dv_up[0] +
                 lg.g[j][1] * dv_up[1];
    }
    double nabla_v[2][2];
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        double v = i == 0 ? dv_lo[j] : 0.0;
        for (int k = 0; k < 2; ++k) v -= lg.gamma[k][i][j] * v_lo[k];
        nabla_v[i][j] = v;
      }
    out[p].rr = -2.0 * lg.ricci[0][0] + 2.0 * nabla_v[0][0];
    out[p].rt = -2.0 * lg.ricci[0][1] + nabla_v[0][1] + nabla_v[1][0];
    out[p].tt = -2.0 * lg.ricci[1][1] + 2.0 * nabla_v[1][1];
  }
}

TensorField flow_rhs(const MetricField& g, const BackgroundGeometry& bg) {
  if (g.grid() != bg.grid() && !g.grid()->same_points(*bg.grid()))
    throw ShapeError("metric and background live on different grids");
  g.require_spd();
  // Non-owning handle: the engine only lives for this call.
  const FlowEngine engine(std::shared_ptr<const BackgroundGeometry>(&bg, [](auto*) {}));
  std::vector<Sym2> out(g.size());
  engine.rhs(g.components(), out);
  return TensorField::from_metric(MetricField(g.grid(), std::move(out)));
}

double cfl_timestep(const MetricField& g, const StepControl& control) {
  double symbol = 0.0;
  for (std::size_t p = 0; p < g.size(); ++p) symbol = std::max(symbol, g[p].tt / g[p].det());
  const double h = g.grid()->min_spacing();
  const double dt = control.cfl_fraction * h * h / (2.0 * kDim * symbol);
  return std::min(dt, control.max_dt);
}

Diagnostics diagnose(const MetricField& g, const BackgroundGeometry& bg, bool with_deturck) {
  Diagnostics d{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
                0.0};
  for (std::size_t p = 0; p < g.size(); ++p) {
    const auto lam = relative_eigenvalues(g[p], bg.metric()[p]);
    d.lambda_min = std::min(d.lambda_min, lam[0]);
    d.lambda_max = std::max(d.lambda_max, lam[1]);
  }
  if (with_deturck) {
    const auto norms = background_norm(deturck_vector(g, bg), bg);
    d.max_deturck = *std::max_element(norms.begin(), norms.end());
  }
  return d;
}

namespace {

void apply_boundary(std::span<Sym2> g, const BoundaryData& boundary, double t) {
  if (!boundary) return;
  const auto [inner, outer] = boundary(t);
  g.front() = inner;
  g.back() = outer;
}

void guard(std::span<const Sym2> g, const BackgroundGeometry& bg, double t, bool spd,
           Diagnostics& diag) {
  diag.lambda_min = std::numeric_limits<double>::infinity();
  diag.lambda_max = -std::numeric_limits<double>::infinity();
  for (std::size_t p = 0; p < g.size(); ++p) {
    if (!std::isfinite(g[p].rr) || !std::isfinite(g[p].rt) || !std::isfinite(g[p].tt))
      throw NonFiniteError(t, p);
    const Sym2& gb = bg.metric()[p];
    const auto lam = relative_eigenvalues(g[p], gb);
    if (spd && !(lam[0] > 1e-12)) throw SpdViolation(t, p, lam[0]);
    diag.lambda_min = std::min(diag.lambda_min, lam[0]);
    diag.lambda_max = std::max(diag.lambda_max, lam[1]);
  }
}

}  // namespace

FlowState FlowEngine::advance(const FlowState& state, double dt, const StepControl& control,
                              const BoundaryData& boundary) const {
  const std::size_t n = state.g.size();
  std::vector<Sym2> k1(n), k2(n), k3(n), k4(n), stage(n);
  std::span<const Sym2> y = state.g.components();
  const double t = state.t;
  // Without boundary data the end rows keep their current values.
  const BoundaryData hold = [ends = std::pair<Sym2, Sym2>{y.front(), y.back()}](double) {
    return ends;
  };
  const BoundaryData& bc = boundary ? boundary : hold;

  auto combine = [&](const std::vector<Sym2>& k, double c, double ts) {
    for (std::size_t p = 0; p < n; ++p) stage[p] = y[p] + (c * dt) * k[p];
    apply_boundary(stage, bc, ts);
  };
  rhs(y, k1);
  combine(k1, 0.5, t + 0.5 * dt);
  rhs(stage, k2);
  combine(k2, 0.5, t + 0.5 * dt);
  rhs(stage, k3);
  combine(k3, 1.0, t + dt);
  rhs(stage, k4);

  std::vector<Sym2> next(n);
  const double w = dt / 6.0;
  for (std::size_t p = 0; p < n; ++p)
    next[p] = y[p] + w * (k1[p] + 2.0 * k2[p] + 2.0 * k3[p] + k4[p]);

  FlowState out;
  out.t = t + dt;
  apply_boundary(next, bc, out.t);
  out.step_count = state.step_count + 1;
  guard(next, *bg_, out.t, control.spd_guard_enabled, out.diagnostics);
  out.g = MetricField(state.g.grid(), std::move(next));
  return out;
}

FlowState step(const FlowState& state, const std::shared_ptr<const BackgroundGeometry>& bg,
               const StepControl& control, const BoundaryData& boundary) {
  control.validate();
  state.g.require_spd();
  double dt = cfl_timestep(state.g, control);
  if (control.t_final > state.t) dt = std::min(dt, control.t_final - state.t);
  const FlowEngine engine(bg);
  FlowState next = engine.advance(state, dt, control, boundary);
  next.diagnostics.max_deturck = diagnose(next.g, *bg, true).max_deturck;
  return next;
}

std::vector<FlowState> run_dirichlet(const DirichletProblem& problem, const StepControl& control) {
  control.validate();
  if (!problem.background) throw DomainError("Dirichlet problem has no background");
  if (!(problem.t_final >= 0.0)) throw DomainError("t_final must be nonnegative");
  const auto& bg = problem.background;

  FlowState state;
  state.g = problem.initial.size() > 0 ? problem.initial : bg->metric();
  if (state.g.grid() != bg->grid() && !state.g.grid()->same_points(*bg->grid()))
    throw ShapeError("initial metric and background live on different grids");
  state.g.require_spd();

  BoundaryData boundary = problem.boundary;
  if (!boundary) {
    const std::pair<Sym2, Sym2> pinned{state.g.components().front(), state.g.components().back()};
    boundary = [pinned](double) { return pinned; };
  }
  apply_boundary(state.g.components(), boundary, 0.0);
  state.diagnostics = diagnose(state.g, *bg, true);

  std::vector<FlowState> snapshots{state};
  if (problem.t_final == 0.0) return snapshots;

  const FlowEngine engine(bg);
  const double interval =
      control.snapshot_interval > 0.0 ? control.snapshot_interval : problem.t_final;
  std::size_t next_index = 1;
  auto snapshot_time = [&](std::size_t k) {
    return std::min(static_cast<double>(k) * interval, problem.t_final);
  };
  double next_time = snapshot_time(next_index);

  while (state.t < problem.t_final) {
    if (state.step_count >= control.max_steps)
      throw Error(fmt::format("step budget of {} exhausted at t = {}", control.max_steps, state.t));
    double dt = cfl_timestep(state.g, control);
    bool lands = false;
    if (state.t + dt >= next_time) {
      dt = next_time - state.t;
      lands = true;
    }
    state = engine.advance(state, dt, control, boundary);
    if (lands) {
      state.t = next_time;
      state.diagnostics.max_deturck = diagnose(state.g, *bg, true).max_deturck;
      snapshots.push_back(state);
      ++next_index;
      next_time = snapshot_time(next_index);
    }
  }
  return snapshots;
}

}  // namespace rdt
