#include "rdt/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

namespace rdt {

using nlohmann::json;

namespace {

// Reads typed fields from one JSON object and rejects keys nobody asked for.
class Section {
 public:
  Section(const json& value, std::string path) : path_(std::move(path)) {
    if (!value.is_object()) throw ConfigError(fmt::format("'{}' must be an object", where()));
    obj_ = &value;
  }

  bool has(const std::string& key) const { return obj_->contains(key); }

  double number(const std::string& key, double fallback) {
    const json* v = take(key);
    if (!v) return fallback;
    if (!v->is_number()) throw type_error(key, "a number");
    return v->get<double>();
  }

  // null stands for +infinity.
  double number_or_inf(const std::string& key, double fallback) {
    const json* v = take(key);
    if (!v) return fallback;
    if (v->is_null()) return std::numeric_limits<double>::infinity();
    if (!v->is_number()) throw type_error(key, "a number or null");
    return v->get<double>();
  }

  long integer(const std::string& key, long fallback) {
    const json* v = take(key);
    if (!v) return fallback;
    if (!v->is_number_integer()) throw type_error(key, "an integer");
    return v->get<long>();
  }

  bool boolean(const std::string& key, bool fallback) {
    const json* v = take(key);
    if (!v) return fallback;
    if (!v->is_boolean()) throw type_error(key, "a boolean");
    return v->get<bool>();
  }

  std::string string(const std::string& key, const std::string& fallback) {
    const json* v = take(key);
    if (!v) return fallback;
    if (!v->is_string()) throw type_error(key, "a string");
    return v->get<std::string>();
  }

  std::vector<double> numbers(const std::string& key, const std::vector<double>& fallback) {
    const json* v = take(key);
    if (!v) return fallback;
    if (!v->is_array()) throw type_error(key, "an array of numbers");
    std::vector<double> out;
    for (const auto& x : *v) {
      if (!x.is_number()) throw type_error(key, "an array of numbers");
      out.push_back(x.get<double>());
    }
    return out;
  }

  std::optional<Section> section(const std::string& key) {
    const json* v = take(key);
    if (!v) return std::nullopt;
    return Section(*v, key_path(key));
  }

  void finish() const {
    for (const auto& [key, _] : obj_->items())
      if (!used_.count(key)) throw ConfigError(fmt::format("unknown key '{}'", key_path(key)));
  }

  std::string key_path(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

 private:
  std::string where() const { return path_.empty() ? "config" : path_; }

  const json* take(const std::string& key) {
    used_.insert(key);
    auto it = obj_->find(key);
    return it == obj_->end() ? nullptr : &*it;
  }

  ConfigError type_error(const std::string& key, const char* expected) const {
    return ConfigError(fmt::format("key '{}' must be {}", key_path(key), expected));
  }

  const json* obj_ = nullptr;
  std::string path_;
  std::set<std::string> used_;
};

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

void validate(const ExperimentConfig& c) {
  try {
    c.geometry.validate();
  } catch (const DomainError& e) {
    throw ConfigError(fmt::format("geometry: {}", e.what()));
  }
  const auto [lo, hi] = chart_domain(c.geometry);
  require(c.grid.n >= 16, "grid.n must be at least 16");
  require(c.grid.r_min < c.grid.r_max, "grid.r_min must be below grid.r_max");
  require(c.grid.spacing != Spacing::log_uniform || c.grid.r_min > 0.0,
          "grid.r_min must be positive for log_uniform spacing");
  require(c.grid.r_min > lo && c.grid.r_max < hi,
          fmt::format("grid [{}, {}] must lie inside the chart ({}, {}) of {}", c.grid.r_min,
                      c.grid.r_max, lo, hi, geometry_name(c.geometry.kind)));

  require(c.flow.cfl_fraction > 0.0 && c.flow.cfl_fraction <= 1.0,
          "flow.cfl_fraction must be in (0,1]");
  require(c.flow.max_dt > 0.0, "flow.max_dt must be positive");
  require(c.flow.t_final >= 0.0 && std::isfinite(c.flow.t_final),
          "flow.t_final must be finite and nonnegative");
  require(c.flow.snapshot_interval >= 0.0, "flow.snapshot_interval must be nonnegative");
  if (c.flow.boundary == BoundaryMode::exact) {
    const auto k = c.geometry.kind;
    require(k == GeometryKind::round_sphere || k == GeometryKind::hyperbolic_plane ||
                k == GeometryKind::hyperbolic_cusp,
            "flow.boundary 'exact' needs a constant-curvature geometry");
  }

  if (c.exhaustion) {
    const auto& e = *c.exhaustion;
    const auto& p = e.params;
    require(p.q > 0.0 && p.q < 1.0, "exhaustion.q must be in (0,1)");
    require(p.k_max >= 1, "exhaustion.k_max must be at least 1");
    require(p.points_per_ratio >= 2, "exhaustion.points_per_ratio must be at least 2");
    require(p.rho0 > 0.0 && p.rho0 < p.r_max, "exhaustion.rho0 must be in (0, exhaustion.r_max)");
    require(p.window_lo < p.window_hi, "exhaustion.window must be increasing");
    require(p.window_lo > p.rho0 && p.window_hi < p.r_max,
            "exhaustion.window must lie inside (exhaustion.rho0, exhaustion.r_max)");
    require(p.rho0 * std::pow(p.q, p.k_max - 1) > lo && p.r_max < hi,
            "exhaustion domains must lie inside the chart");
    require(e.t_final >= 0.0 && std::isfinite(e.t_final),
            "exhaustion.t_final must be finite and nonnegative");
    require(e.snapshot_interval >= 0.0, "exhaustion.snapshot_interval must be nonnegative");
    require(e.tolerance > 0.0, "exhaustion.tolerance must be positive");
    require(e.max_order >= 0 && e.max_order <= 3, "exhaustion.max_order must be in 0..3");
  }

  for (double d : c.audit.deltas) require(d >= 0.0, "audit.deltas must be nonnegative");
  require(c.audit.max_order >= 1 && c.audit.max_order <= 3, "audit.max_order must be in 1..3");
  require(c.audit.exponent_slack >= 0.0, "audit.exponent_slack must be nonnegative");
  require(c.audit.outer_collar >= 0.0 && c.audit.outer_collar < 1.0,
          "audit.outer_collar must be in [0,1)");
  require(c.audit.rho_max > 0.0, "audit.rho_max must be positive");
  require(c.audit.noise_floor >= 0.0, "audit.noise_floor must be nonnegative");
  require(!c.output_directory.empty(), "output.directory must not be empty");
}

}  // namespace

std::string_view to_string(BoundaryMode mode) {
  return mode == BoundaryMode::pinned ? "pinned" : "exact";
}

StepControl ExperimentConfig::step_control() const {
  StepControl s;
  s.cfl_fraction = flow.cfl_fraction;
  s.max_dt = flow.max_dt;
  s.t_final = flow.t_final;
  s.snapshot_interval = flow.snapshot_interval;
  s.spd_guard_enabled = flow.spd_guard;
  return s;
}

ExperimentConfig parse_config_text(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(fmt::format("config is not valid JSON: {}", e.what()));
  }
  Section top(root, "");
  ExperimentConfig c;

  auto geo = top.section("geometry");
  if (!geo) throw ConfigError("missing required key 'geometry'");
  if (!geo->has("name")) throw ConfigError("missing required key 'geometry.name'");
  try {
    c.geometry.kind = parse_geometry(geo->string("name", ""));
  } catch (const DomainError& e) {
    throw ConfigError(fmt::format("geometry.name: {}", e.what()));
  }
  c.geometry.beta = geo->number("beta", c.geometry.beta);
  c.geometry.radius = geo->number("radius", c.geometry.radius);
  c.geometry.amplitude = geo->number("amplitude", c.geometry.amplitude);
  const std::string profile = geo->string("profile", "sin_log");
  if (profile != "sin_log")
    throw ConfigError(fmt::format("geometry.profile must be 'sin_log', got '{}'", profile));
  geo->finish();

  if (auto g = top.section("grid")) {
    const long n = g->integer("n", static_cast<long>(c.grid.n));
    if (n < 16) throw ConfigError("grid.n must be at least 16");
    c.grid.n = static_cast<std::size_t>(n);
    try {
      c.grid.spacing = parse_spacing(g->string("spacing", std::string(to_string(c.grid.spacing))));
    } catch (const DomainError& e) {
      throw ConfigError(fmt::format("grid.spacing: {}", e.what()));
    }
    c.grid.r_min = g->number("r_min", c.grid.r_min);
    c.grid.r_max = g->number("r_max", c.grid.r_max);
    g->finish();
  }

  if (auto f = top.section("flow")) {
    c.flow.cfl_fraction = f->number("cfl_fraction", c.flow.cfl_fraction);
    c.flow.max_dt = f->number_or_inf("max_dt", c.flow.max_dt);
    c.flow.t_final = f->number("t_final", c.flow.t_final);
    c.flow.snapshot_interval = f->number("snapshot_interval", c.flow.snapshot_interval);
    c.flow.spd_guard = f->boolean("spd_guard", c.flow.spd_guard);
    const std::string b = f->string("boundary", "pinned");
    if (b == "pinned")
      c.flow.boundary = BoundaryMode::pinned;
    else if (b == "exact")
      c.flow.boundary = BoundaryMode::exact;
    else
      throw ConfigError(fmt::format("flow.boundary must be 'pinned' or 'exact', got '{}'", b));
    f->finish();
  }

  if (auto e = top.section("exhaustion")) {
    ExhaustionConfig x;
    x.params.rho0 = e->number("rho0", x.params.rho0);
    x.params.q = e->number("q", x.params.q);
    x.params.k_max = static_cast<int>(e->integer("k_max", x.params.k_max));
    x.params.r_max = e->number("r_max", x.params.r_max);
    const auto w = e->numbers("window", {x.params.window_lo, x.params.window_hi});
    if (w.size() != 2) throw ConfigError("exhaustion.window must hold two numbers");
    x.params.window_lo = w[0];
    x.params.window_hi = w[1];
    x.params.points_per_ratio =
        static_cast<int>(e->integer("points_per_ratio", x.params.points_per_ratio));
    x.t_final = e->number("t_final", x.t_final);
    x.snapshot_interval = e->number("snapshot_interval", x.snapshot_interval);
    x.tolerance = e->number("tolerance", x.tolerance);
    x.max_order = static_cast<int>(e->integer("max_order", x.max_order));
    e->finish();
    c.exhaustion = x;
  }

  if (auto a = top.section("audit")) {
    c.audit.deltas = a->numbers("deltas", c.audit.deltas);
    c.audit.max_order = static_cast<int>(a->integer("max_order", c.audit.max_order));
    c.audit.exponent_slack = a->number("exponent_slack", c.audit.exponent_slack);
    c.audit.outer_collar = a->number("outer_collar", c.audit.outer_collar);
    c.audit.rho_max = a->number("rho_max", c.audit.rho_max);
    c.audit.noise_floor = a->number("noise_floor", c.audit.noise_floor);
    a->finish();
  }

  if (auto o = top.section("output")) {
    c.output_directory = o->string("directory", c.output_directory);
    o->finish();
  }
  top.finish();
  validate(c);
  return c;
}

ExperimentConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open config '{}'", path.string()));
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config_text(text.str());
}

std::string serialize_config(const ExperimentConfig& c) {
  json j;
  j["geometry"] = {{"name", std::string(geometry_name(c.geometry.kind))},
                   {"beta", c.geometry.beta},
                   {"radius", c.geometry.radius},
                   {"amplitude", c.geometry.amplitude},
                   {"profile", "sin_log"}};
  j["grid"] = {{"n", c.grid.n},
               {"spacing", std::string(to_string(c.grid.spacing))},
               {"r_min", c.grid.r_min},
               {"r_max", c.grid.r_max}};
  j["flow"] = {{"cfl_fraction", c.flow.cfl_fraction},
               {"max_dt", std::isinf(c.flow.max_dt) ? json(nullptr) : json(c.flow.max_dt)},
               {"t_final", c.flow.t_final},
               {"snapshot_interval", c.flow.snapshot_interval},
               {"spd_guard", c.flow.spd_guard},
               {"boundary", std::string(to_string(c.flow.boundary))}};
  if (c.exhaustion) {
    const auto& x = *c.exhaustion;
    j["exhaustion"] = {{"rho0", x.params.rho0},
                       {"q", x.params.q},
                       {"k_max", x.params.k_max},
                       {"r_max", x.params.r_max},
                       {"window", {x.params.window_lo, x.params.window_hi}},
                       {"points_per_ratio", x.params.points_per_ratio},
                       {"t_final", x.t_final},
                       {"snapshot_interval", x.snapshot_interval},
                       {"tolerance", x.tolerance},
                       {"max_order", x.max_order}};
  }
  j["audit"] = {{"deltas", c.audit.deltas},
                {"max_order", c.audit.max_order},
                {"exponent_slack", c.audit.exponent_slack},
                {"outer_collar", c.audit.outer_collar},
                {"rho_max", c.audit.rho_max},
                {"noise_floor", c.audit.noise_floor}};
  j["output"] = {{"directory", c.output_directory}};
  return j.dump(2) + "\n";
}

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace rdt
