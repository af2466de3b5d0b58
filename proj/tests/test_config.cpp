#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "rdt/config.hpp"
#include "rdt/error.hpp"
#include "rdt/harness.hpp"

using namespace rdt;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("rdt_test_" + name);
  fs::remove_all(dir);
  return dir;
}

std::string error_of(const std::string& text) {
  try {
    parse_config_text(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("minimal config gets defaults") {
  const auto c = parse_config_text(R"({"geometry": {"name": "flat_cone"}})");
  CHECK(c.geometry.kind == GeometryKind::flat_cone);
  CHECK(c.grid == GridConfig{});
  CHECK(c.flow == FlowConfig{});
  CHECK(c.audit == AuditConfig{});
  CHECK_FALSE(c.exhaustion.has_value());
  CHECK(c.output_directory == "rdt_output");
}

TEST_CASE("config errors name the key") {
  CHECK(error_of(R"({"geometry": {"name": "flat_cone"}, "flow": {"cfl_fraction": 1.5}})")
            .find("must be in (0,1]") != std::string::npos);
  CHECK(error_of(R"({"geometry": {"name": "flat_cone"}, "exhaustion": {"window": [0.5, 0.4]}})")
            .find("window must be increasing") != std::string::npos);
  CHECK(error_of(R"({"geometry": {"name": "flat_cone"}, "grid": {"nn": 64}})") ==
        "unknown key 'grid.nn'");
  CHECK(error_of(R"({"geometry": {"name": "flat_cone"}, "extra": 1})") == "unknown key 'extra'");
  CHECK(error_of(R"({"geometry": {"name": "flat_cone"}, "grid": {"n": "many"}})") ==
        "key 'grid.n' must be an integer");
  CHECK(error_of(R"({"geometry": {"name": "flat_cone"}, "flow": {"spd_guard": 1}})") ==
        "key 'flow.spd_guard' must be a boolean");
  CHECK(error_of(R"({"grid": {}})") == "missing required key 'geometry'");
  CHECK(error_of(R"({"geometry": {"name": "torus"}})").find("sphere") != std::string::npos);
  CHECK(error_of(R"({"geometry": {"name": "flat_cone", "beta": 2}})").find("geometry") !=
        std::string::npos);
  // Window outside D_0.
  CHECK(error_of(R"({"geometry": {"name": "flat_cone"}, "exhaustion": {"window": [0.1, 0.8]}})")
            .find("exhaustion.window") != std::string::npos);
  // Grid outside the sphere chart.
  CHECK(error_of(R"({"geometry": {"name": "sphere"}, "grid": {"r_max": 4.0}})")
            .find("chart") != std::string::npos);
  CHECK(error_of(R"({"geometry": {"name": "flat_cone"}, "flow": {"boundary": "exact"}})")
            .find("flow.boundary") != std::string::npos);
  CHECK(error_of("{not json").find("not valid JSON") != std::string::npos);
  CHECK_THROWS_AS(parse_config("/nonexistent/config.json"), ConfigError);
}

TEST_CASE("config round trip") {
  const auto c = parse_config_text(R"({
    "geometry": {"name": "perturbed_cone", "beta": 0.7, "amplitude": 0.05},
    "grid": {"n": 40, "spacing": "log_uniform", "r_min": 0.03, "r_max": 0.9},
    "flow": {"cfl_fraction": 0.8, "max_dt": 1e-4, "t_final": 0.1, "snapshot_interval": 0.01},
    "exhaustion": {"rho0": 0.2, "q": 0.5, "k_max": 3, "window": [0.4, 0.8]},
    "audit": {"deltas": [0.1], "max_order": 3, "outer_collar": 0.1},
    "output": {"directory": "somewhere"}
  })");
  const std::string text = serialize_config(c);
  const auto back = parse_config_text(text);
  CHECK(back == c);
  CHECK(serialize_config(back) == text);
  CHECK(fnv1a(text) == fnv1a(serialize_config(back)));

  const auto inf = parse_config_text(R"({"geometry": {"name": "flat_cone"}})");
  CHECK(parse_config_text(serialize_config(inf)) == inf);
}

TEST_CASE("fnv1a") {
  CHECK(fnv1a("") == 0xcbf29ce484222325ull);
  CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cull);
  CHECK(fnv1a("foobar") == 0x85944171f73967e8ull);
}

TEST_CASE("run experiment") {
  const fs::path dir = scratch("cone");
  auto c = parse_config_text(R"({"geometry": {"name": "flat_cone", "beta": 0.5},
                                 "grid": {"n": 48},
                                 "flow": {"t_final": 0.005, "snapshot_interval": 0.001}})");
  c.output_directory = dir.string();
  const auto out = run_experiment(c);
  CHECK(out.exit_code == 0);
  CHECK(out.pass);

  const auto report = nlohmann::json::parse(slurp(dir / "report.json"));
  for (const char* key : {"equivalence_window", "profiles", "fits", "proof_device_audits",
                          "convergence_report"})
    CHECK(report.at(key).at("pass").get<bool>());

  SUBCASE("manifest references files that exist and parse") {
    const auto manifest = nlohmann::json::parse(slurp(dir / "manifest.json"));
    CHECK(manifest.at("config_hash").get<std::string>().size() == 16);
    CHECK(parse_config_text(manifest.at("config").dump()) == c);
    for (const auto& f : manifest.at("files")) {
      const fs::path p = dir / f.at("name").get<std::string>();
      REQUIRE(fs::exists(p));
      if (p.extension() == ".json") CHECK(nlohmann::json::parse(slurp(p)).is_object());
    }
  }
  SUBCASE("snapshots csv") {
    std::istringstream csv(slurp(dir / "snapshots.csv"));
    std::string line;
    std::getline(csv, line);
    CHECK(line == "t,r,g_rr,g_rtheta,g_thetatheta,lambda_min,lambda_max");
    std::size_t rows = 0;
    while (std::getline(csv, line)) ++rows;
    CHECK(rows == 6 * 48);
  }
  SUBCASE("rerun is byte identical") {
    const std::string first = slurp(dir / "report.json");
    const std::string csv = slurp(dir / "snapshots.csv");
    const std::string manifest = slurp(dir / "manifest.json");
    run_experiment(c);
    CHECK(slurp(dir / "report.json") == first);
    CHECK(slurp(dir / "snapshots.csv") == csv);
    CHECK(slurp(dir / "manifest.json") == manifest);
  }
  SUBCASE("audit of stored snapshots reproduces the fits") {
    const auto again = audit_snapshots(dir / "snapshots.csv", c);
    CHECK(again.pass);
    const auto audit = nlohmann::json::parse(slurp(dir / "audit_report.json"));
    CHECK(audit.at("fits") == report.at("fits"));
    CHECK(audit.at("equivalence_window") == report.at("equivalence_window"));
  }
  SUBCASE("audit rejects a different grid") {
    auto other = c;
    other.grid.n = 50;
    CHECK_THROWS_AS(audit_snapshots(dir / "snapshots.csv", other), ShapeError);
  }
  fs::remove_all(dir);
}

TEST_CASE("sphere run past the collapse aborts") {
  const fs::path dir = scratch("sphere");
  auto c = parse_config_text(R"({"geometry": {"name": "sphere"},
      "grid": {"n": 32, "spacing": "uniform", "r_min": 0.5, "r_max": 2.6},
      "flow": {"t_final": 0.6, "boundary": "exact"}})");
  c.output_directory = dir.string();
  const auto out = run_experiment(c);
  CHECK(out.exit_code == 2);
  const auto err = nlohmann::json::parse(slurp(dir / "error.json"));
  CHECK(err.at("error") == "spd_violation");
  CHECK(err.at("t").get<double>() == doctest::Approx(0.5).epsilon(0.02));
  CHECK_FALSE(fs::exists(dir / "report.json"));
  fs::remove_all(dir);
}

TEST_CASE("list and describe") {
  const std::string list = list_experiments();
  for (const char* name : {"flat_cone", "perturbed_cone", "sphere", "hyperbolic_cusp"})
    CHECK(list.find(name) != std::string::npos);
  CHECK(list.find("flat_cone") < list.find("sphere"));

  const std::string d = describe("perturbed_cone");
  for (const char* key : {"k0 =", "c_1 =", "c_2 =", "profile bound"})
    CHECK(d.find(key) != std::string::npos);
  try {
    describe("klein_bottle");
    FAIL("expected an error");
  } catch (const DomainError& e) {
    CHECK(std::string(e.what()).find("perturbed_cone") != std::string::npos);
  }
}
