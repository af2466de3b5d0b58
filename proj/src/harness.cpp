#include "rdt/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include <boost/version.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "rdt/audit.hpp"
#include "rdt/barriers.hpp"
#include "rdt/exhaustion.hpp"

namespace rdt {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kAuditSeed = 0x5eed'0f'ba44'1e55ull;

// Portable uniform in [0, 1); std::uniform_real_distribution is not.
double unit01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1p-53; }

// NaN and infinity have no JSON spelling.
json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(fmt::format("cannot write '{}'", path.string()));
  out << text;
  if (!out) throw Error(fmt::format("write failed for '{}'", path.string()));
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(fmt::format("cannot open '{}'", path.string()));
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string hex64(std::uint64_t h) { return fmt::format("{:016x}", h); }

std::vector<EigenRecord> eigen_records(const std::vector<FlowState>& snapshots,
                                       const BackgroundGeometry& bg) {
  std::vector<EigenRecord> out;
  for (const auto& s : snapshots) {
    const Diagnostics d = diagnose(s.g, bg, false);
    out.push_back({s.t, d.lambda_min, d.lambda_max});
  }
  return out;
}

json equivalence_section(const std::vector<EigenRecord>& records, const AuditConfig& audit) {
  const auto windows = uniform_equivalence_window(records, audit.deltas);
  json sec;
  sec["records"] = json::array();
  for (const auto& r : records)
    sec["records"].push_back({{"t", r.t}, {"lambda_min", num(r.lambda_min)},
                              {"lambda_max", num(r.lambda_max)}});
  sec["windows"] = json::array();
  bool monotone = true;
  double prev = -1.0;
  for (const auto& [delta, window] : windows) {
    sec["windows"].push_back({{"delta", delta}, {"t_emp", window}});
    if (window < prev) monotone = false;
    prev = window;
  }
  sec["monotone"] = monotone;
  sec["pass"] = monotone;
  return sec;
}

std::vector<ShellProfile> snapshot_profiles(const FlowState& s, const BackgroundGeometry& bg,
                                            const AuditConfig& audit) {
  const ProfileOptions opt{audit.outer_collar};
  std::vector<ShellProfile> out;
  for (int m = 1; m <= audit.max_order; ++m) out.push_back(derivative_profile(s.g, bg, m, opt));
  out.push_back(deturck_norm_audit(s.g, bg, opt));
  for (int m = 0; m + 2 <= audit.max_order; ++m) out.push_back(curvature_audit(s.g, bg, m, opt));
  for (auto& p : out) p.t = s.t;
  return out;
}

struct SnapshotAudit {
  json equivalence_window, profiles, fits;
  std::string profiles_csv;
  bool pass = true;
};

SnapshotAudit audit_flow(const std::vector<FlowState>& snapshots, const BackgroundGeometry& bg,
                         const AuditConfig& audit) {
  SnapshotAudit out;
  out.equivalence_window = equivalence_section(eigen_records(snapshots, bg), audit);
  out.profiles_csv = "t,quantity,order,rho,norm\n";
  json prof_entries = json::array(), fit_entries = json::array();
  bool prof_pass = true, fit_pass = true;
  const FitOptions fopt{audit.exponent_slack, audit.rho_max, audit.noise_floor};

  for (const auto& s : snapshots) {
    for (const auto& p : snapshot_profiles(s, bg, audit)) {
      bool finite = true;
      double max_norm = 0.0;
      for (std::size_t i = 0; i < p.rho.size(); ++i) {
        out.profiles_csv +=
            fmt::format("{:.17g},{},{},{:.17g},{:.17g}\n", p.t, p.quantity, p.order, p.rho[i],
                        p.norm[i]);
        finite = finite && std::isfinite(p.norm[i]);
        max_norm = std::max(max_norm, p.norm[i]);
      }
      prof_pass = prof_pass && finite;
      prof_entries.push_back({{"t", p.t}, {"quantity", p.quantity}, {"order", p.order},
                              {"applicable", p.applicable}, {"status", p.status},
                              {"shells", p.rho.size()}, {"max_norm", num(max_norm)},
                              {"pass", finite}});

      json f{{"t", p.t}, {"quantity", p.quantity}, {"order", p.order},
             {"exponent", p.exponent}, {"slack", fopt.slack}, {"rho_max", fopt.rho_max},
             {"noise_floor", fopt.noise_floor}};
      try {
        const ScalingFit fit = scaling_exponent_fit(p, fopt);
        f["applicable"] = fit.applicable;
        f["degenerate"] = fit.degenerate;
        f["rho"] = fit.rho;
        f["envelope"] = fit.envelope;
        f["slope"] = num(fit.slope);
        f["intercept"] = num(fit.intercept);
        f["residual"] = num(fit.residual);
        f["status"] = fit.applicable ? "ok" : p.status;
        f["pass"] = fit.pass;
      } catch (const DomainError& e) {
        f["applicable"] = true;
        f["status"] = e.what();
        f["pass"] = false;
      }
      fit_pass = fit_pass && f["pass"].get<bool>();
      fit_entries.push_back(std::move(f));
    }
  }
  out.profiles = {{"file", "profiles.csv"}, {"entries", prof_entries}, {"pass", prof_pass}};
  out.fits = {{"entries", fit_entries}, {"pass", fit_pass}};
  out.pass = out.equivalence_window["pass"].get<bool>() && prof_pass && fit_pass;
  return out;
}

json proof_device_audits(const AuditConfig& audit) {
  std::mt19937_64 rng(kAuditSeed);
  json sec;
  bool all = true;

  const CutoffProfile eta;
  const CutoffAudit ca = audit_cutoff(eta);
  sec["eta"] = {{"samples", ca.samples},         {"max_d2", ca.max_d2},
                {"max_grad_ratio", ca.max_grad_ratio}, {"max_sqrt_ratio", ca.max_sqrt_ratio},
                {"nonincreasing", ca.nonincreasing},   {"budgets", {8.0, 16.0, 4.0}},
                {"pass", ca.pass}};
  all = all && ca.pass;

  // |xi'|^2 <= 256 / delta^2 for the ball bump.
  json grads = json::array();
  bool grad_pass = true;
  for (double delta : audit.deltas) {
    if (!(delta > 0.0 && delta <= 1.0)) continue;
    const BumpFunction xi(eta, BumpVariant::ball, 0.5, delta);
    double worst = 0.0;
    for (int i = 0; i < 100000; ++i) {
      const double d = xi.support_radius() * 1.1 * unit01(rng);
      worst = std::max(worst, xi.d1(d) * xi.d1(d));
    }
    const double budget = 256.0 / (delta * delta);
    grads.push_back({{"delta", delta}, {"max_grad_sq", worst}, {"budget", budget},
                     {"pass", worst <= budget}});
    grad_pass = grad_pass && worst <= budget;
  }
  sec["xi_gradient"] = {{"cases", grads}, {"pass", grad_pass}};
  all = all && grad_pass;

  json hess = json::array();
  bool hess_pass = true;
  for (auto kind : {GeometryKind::flat_plane, GeometryKind::round_sphere}) {
    GeometrySpec spec;
    spec.kind = kind;
    const double r_max = kind == GeometryKind::flat_plane ? 2.0 : 3.0;
    const auto bg = instantiate(spec, RadialGrid::make(400, Spacing::uniform, 0.01, r_max));
    const double k0 = kind == GeometryKind::flat_plane ? 0.0 : bg->k0();
    for (double delta : {0.5, 1.0}) {
      const BumpFunction xi(eta, BumpVariant::ball, 0.25, delta);
      const XiHessianCheck h = xi_hessian_check(*bg, xi, k0);
      const bool ok = h.min_eigenvalue >= -1e-8;
      hess.push_back({{"geometry", std::string(geometry_name(kind))}, {"delta", delta},
                      {"k0", k0}, {"min_eigenvalue", h.min_eigenvalue}, {"pass", ok}});
      hess_pass = hess_pass && ok;
    }
  }
  sec["xi_hessian"] = {{"cases", hess}, {"tolerance", -1e-8}, {"pass", hess_pass}};
  all = all && hess_pass;

  std::vector<double> zs(100000);
  for (auto& z : zs) z = 1e-8 + 50.0 * unit01(rng);
  const bool coth_ok = coth_linear_check(zs);
  sec["coth_linear"] = {{"samples", zs.size()}, {"z_max", 50.0}, {"pass", coth_ok}};
  all = all && coth_ok;

  double min_ratio = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 10000; ++i) {
    double a = 10.0 * unit01(rng), b = 10.0 * unit01(rng), c = 10.0 * unit01(rng);
    // Every fourth triple drops a coefficient so the sparse branches get exercised.
    if (i % 4 == 1) a = 0.0;
    if (i % 4 == 2) b = 0.0;
    if (i % 4 == 3) c = 0.0;
    const double x = largest_feasible_x(a, b, c);
    if (x > 0.0) min_ratio = std::min(min_ratio, elementary_estimate_bound(a, b, c) / x);
  }
  sec["elementary_estimate"] = {{"triples", 10000}, {"min_bound_ratio", num(min_ratio)},
                                {"pass", min_ratio >= 1.0}};
  all = all && min_ratio >= 1.0;

  json shi = json::array();
  bool shi_pass = true;
  for (int n = 2; n <= 8; ++n) {
    const ShiConstantAudit s = shi_constant_audit(n);
    shi.push_back({{"n", n}, {"m", s.params.m}, {"a", s.params.a},
                   {"eps_denominator", s.params.eps_denominator},
                   {"m_eps_identity", s.m_eps_identity}, {"log_margin_upper", s.log_margin_upper},
                   {"log_margin_lower", s.log_margin_lower},
                   {"log_margin_lower_direct", s.log_margin_lower_direct}, {"pass", s.pass}});
    shi_pass = shi_pass && s.pass;
  }
  sec["shi_constants"] = {{"cases", shi}, {"pass", shi_pass}};
  all = all && shi_pass;

  sec["seed"] = kAuditSeed;
  sec["pass"] = all;
  return sec;
}

json convergence_section(const ExperimentConfig& config) {
  if (!config.exhaustion) return {{"enabled", false}, {"pass", true}};
  const ExhaustionConfig& ex = *config.exhaustion;
  const ExhaustionSchedule schedule = build_exhaustion(ex.params);
  StepControl control = config.step_control();
  control.t_final = ex.t_final;
  control.snapshot_interval = ex.snapshot_interval;
  const auto members = run_exhaustion(schedule, config.geometry, control, ex.t_final);
  const ConvergenceReport rep =
      diagonal_convergence(members, schedule, ex.max_order, ex.tolerance);
  std::vector<double> inner;
  for (std::size_t k = 0; k < schedule.depth(); ++k) inner.push_back(schedule.inner_radius(k));
  return {{"enabled", true},
          {"inner_radii", inner},
          {"outer_radius", schedule.outer_radius},
          {"max_order", rep.max_order},
          {"gaps", rep.gaps},
          {"monotone", rep.monotone},
          {"final_gap", rep.final_gap},
          {"tolerance", rep.tolerance},
          {"slack", rep.slack},
          {"noise_floor", rep.noise_floor},
          {"pass", rep.pass}};
}

std::string snapshots_csv(const std::vector<FlowState>& snapshots, const BackgroundGeometry& bg) {
  std::string out = "t,r,g_rr,g_rtheta,g_thetatheta,lambda_min,lambda_max\n";
  const auto& grid = *bg.grid();
  for (const auto& s : snapshots) {
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const Sym2& g = s.g[i];
      const auto lam = relative_eigenvalues(g, bg.metric()[i]);
      out += fmt::format("{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", s.t,
                         grid.r(i), g.rr, g.rt, g.tt, lam[0], lam[1]);
    }
  }
  return out;
}

json manifest(const ExperimentConfig& config, const fs::path& dir,
              const std::vector<std::string>& files) {
  const std::string canonical = serialize_config(config);
  json m;
  m["config_hash"] = hex64(fnv1a(canonical));
  m["config"] = json::parse(canonical);
  m["grid"] = {{"n", config.grid.n},
               {"spacing", std::string(to_string(config.grid.spacing))},
               {"r_min", config.grid.r_min},
               {"r_max", config.grid.r_max}};
  m["versions"] = {{"rdt", std::string(kVersion)},
                   {"fmt", FMT_VERSION},
                   {"boost", BOOST_LIB_VERSION},
                   {"nlohmann_json", fmt::format("{}.{}.{}", NLOHMANN_JSON_VERSION_MAJOR,
                                                 NLOHMANN_JSON_VERSION_MINOR,
                                                 NLOHMANN_JSON_VERSION_PATCH)},
                   {"compiler", __VERSION__}};
  m["files"] = json::array();
  for (const auto& f : files)
    m["files"].push_back({{"name", f}, {"fnv1a", hex64(fnv1a(read_file(dir / f)))}});
  return m;
}

std::shared_ptr<const BackgroundGeometry> make_background(const ExperimentConfig& config) {
  return instantiate(config.geometry, RadialGrid::make(config.grid.n, config.grid.spacing,
                                                       config.grid.r_min, config.grid.r_max));
}

RunOutcome abort_run(const ExperimentConfig& config, const fs::path& dir, json error) {
  error["config_hash"] = hex64(fnv1a(serialize_config(config)));
  write_file(dir / "error.json", error.dump(2) + "\n");
  write_file(dir / "manifest.json", manifest(config, dir, {"error.json"}).dump(2) + "\n");
  return {2, false, dir};
}

}  // namespace

RunOutcome run_experiment(const ExperimentConfig& config) {
  const fs::path dir = config.output_directory;
  fs::create_directories(dir);
  for (const char* stale : {"error.json", "report.json", "snapshots.csv", "profiles.csv"})
    fs::remove(dir / stale);

  const auto bg = make_background(config);
  DirichletProblem problem{bg, {}, {}, config.flow.t_final};
  if (config.flow.boundary == BoundaryMode::exact)
    problem.boundary = homothety_boundary(config.geometry, *bg);

  std::vector<FlowState> snapshots;
  json convergence;
  try {
    snapshots = run_dirichlet(problem, config.step_control());
    convergence = convergence_section(config);
  } catch (const SpdViolation& e) {
    return abort_run(config, dir,
                     {{"error", "spd_violation"}, {"message", e.what()}, {"t", e.time()},
                      {"index", e.index()}, {"eigenvalue", num(e.eigenvalue())}});
  } catch (const NonFiniteError& e) {
    return abort_run(config, dir,
                     {{"error", "non_finite"}, {"message", e.what()}, {"t", e.time()},
                      {"index", e.index()}});
  } catch (const MemberFailure& e) {
    return abort_run(config, dir,
                     {{"error", "exhaustion_member_failed"}, {"message", e.what()},
                      {"member", e.member()}});
  }

  SnapshotAudit sa = audit_flow(snapshots, *bg, config.audit);
  json report;
  report["equivalence_window"] = std::move(sa.equivalence_window);
  report["profiles"] = std::move(sa.profiles);
  report["fits"] = std::move(sa.fits);
  report["proof_device_audits"] = proof_device_audits(config.audit);
  report["convergence_report"] = std::move(convergence);
  bool pass = true;
  for (const char* key : {"equivalence_window", "profiles", "fits", "proof_device_audits",
                          "convergence_report"})
    pass = pass && report[key]["pass"].get<bool>();
  report["snapshots"] = snapshots.size();
  report["pass"] = pass;

  write_file(dir / "snapshots.csv", snapshots_csv(snapshots, *bg));
  write_file(dir / "profiles.csv", sa.profiles_csv);
  write_file(dir / "report.json", report.dump(2) + "\n");
  write_file(dir / "manifest.json",
             manifest(config, dir, {"snapshots.csv", "profiles.csv", "report.json"}).dump(2) +
                 "\n");
  return {0, pass, dir};
}

RunOutcome audit_snapshots(const fs::path& csv, const ExperimentConfig& config) {
  const auto bg = make_background(config);
  const auto& grid = *bg->grid();
  std::istringstream in(read_file(csv));
  std::string line;
  if (!std::getline(in, line) || line != "t,r,g_rr,g_rtheta,g_thetatheta,lambda_min,lambda_max")
    throw ShapeError(fmt::format("'{}' is not a snapshots CSV", csv.string()));

  std::vector<FlowState> snapshots;
  std::vector<Sym2> rows;
  double t_cur = 0.0;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    double v[7];
    const char* p = line.c_str();
    for (int c = 0; c < 7; ++c) {
      char* end = nullptr;
      v[c] = std::strtod(p, &end);
      if (end == p || (c < 6 && *end != ',') || (c == 6 && *end != '\0'))
        throw ShapeError(fmt::format("{}:{}: malformed row", csv.string(), lineno));
      p = end + 1;
    }
    if (rows.empty()) t_cur = v[0];
    if (v[0] != t_cur) throw ShapeError(fmt::format("{}:{}: snapshot is short", csv.string(), lineno));
    if (v[1] != grid.r(rows.size()))
      throw ShapeError(fmt::format("{}:{}: radius {} does not match the config grid",
                                   csv.string(), lineno, v[1]));
    rows.push_back({v[2], v[3], v[4]});
    if (rows.size() == grid.size()) {
      snapshots.push_back({t_cur, MetricField(bg->grid(), std::move(rows)), 0, {}});
      rows.clear();
    }
  }
  if (!rows.empty()) throw ShapeError(fmt::format("{}: last snapshot is short", csv.string()));
  if (snapshots.empty()) throw ShapeError(fmt::format("{}: no snapshots", csv.string()));

  SnapshotAudit sa = audit_flow(snapshots, *bg, config.audit);
  json report;
  report["source"] = csv.filename().string();
  report["equivalence_window"] = std::move(sa.equivalence_window);
  report["profiles"] = std::move(sa.profiles);
  report["fits"] = std::move(sa.fits);
  report["snapshots"] = snapshots.size();
  report["pass"] = sa.pass;
  const fs::path dir = config.output_directory;
  fs::create_directories(dir);
  write_file(dir / "audit_report.json", report.dump(2) + "\n");
  return {0, sa.pass, dir};
}

namespace {

struct Builtin {
  GeometryKind kind;
  const char* metric;
  Spacing spacing;
  double r_min, r_max;
};

constexpr Builtin kBuiltins[] = {
    {GeometryKind::flat_cone, "dr^2 + beta^2 r^2 dtheta^2", Spacing::log_uniform, 0.05, 1.0},
    {GeometryKind::flat_plane, "dr^2 + r^2 dtheta^2", Spacing::uniform, 0.05, 1.0},
    {GeometryKind::hyperbolic_cusp, "dr^2 + e^{-2r} dtheta^2", Spacing::uniform, 0.0, 3.0},
    {GeometryKind::hyperbolic_plane, "dr^2 + sinh^2 r dtheta^2", Spacing::uniform, 0.05, 2.0},
    {GeometryKind::perturbed_cone, "e^{2u} (dr^2 + beta^2 r^2 dtheta^2), u = a sin(log r)",
     Spacing::log_uniform, 0.05, 1.0},
    {GeometryKind::round_sphere, "dr^2 + R^2 sin^2(r/R) dtheta^2", Spacing::uniform, 0.1,
     std::numbers::pi - 0.1},
};

const Builtin& builtin(GeometryKind kind) {
  for (const auto& b : kBuiltins)
    if (b.kind == kind) return b;
  throw DomainError("no built-in spec");
}

}  // namespace

GeometrySpec builtin_spec(GeometryKind kind) {
  GeometrySpec s;
  s.kind = kind;
  if (kind == GeometryKind::flat_cone || kind == GeometryKind::perturbed_cone) s.beta = 0.5;
  if (kind == GeometryKind::perturbed_cone) s.amplitude = 0.1;
  return s;
}

std::string list_experiments() {
  std::string out;
  for (const auto& name : geometry_names()) {
    const Builtin& b = builtin(parse_geometry(name));
    out += fmt::format("{:<17} {}\n", name, b.metric);
  }
  return out;
}

std::string describe(std::string_view name) {
  const GeometryKind kind = parse_geometry(name);
  const Builtin& b = builtin(kind);
  const GeometrySpec spec = builtin_spec(kind);
  const auto bg = instantiate(spec, RadialGrid::make(128, b.spacing, b.r_min, b.r_max));
  const auto [lo, hi] = chart_domain(spec);
  std::string out;
  out += fmt::format("{}: {}\n", name, b.metric);
  out += fmt::format("  spec: beta = {}, radius = {}, amplitude = {}\n", spec.beta, spec.radius,
                     spec.amplitude);
  out += fmt::format("  chart: r in ({}, {}), {}\n", lo, hi,
                     bg->complete() ? "complete" : "incomplete");
  out += fmt::format("  sample grid: 128 {} points on [{}, {}]\n", to_string(b.spacing), b.r_min,
                     b.r_max);
  out += fmt::format("  k0 = {:.6g}\n", bg->k0());
  const auto& c = bg->derivative_bounds();
  out += fmt::format("  c_1 = {:.6g}\n  c_2 = {:.6g}\n", c.at(1), c.at(2));
  if (bg->complete()) {
    out += "  weighted bounds: none (no singular stratum)\n";
  } else {
    for (const auto& [s, v] : bg->weighted_derivative_bounds())
      out += fmt::format("  sup rho^{} |nabla^{} Rm| = {:.6g}\n", s, s, v);
  }
  if (kind == GeometryKind::perturbed_cone)
    out += fmt::format("  profile bound A = {:.6g}\n", profile_bound(spec));
  out += "  audits: equivalence_window, nabla_g, deturck, riemann, nabla_riemann, "
         "proof devices";
  out += bg->complete() ? " (shell profiles not applicable)\n" : "\n";
  return out;
}

}  // namespace rdt
