#include <iostream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "rdt/harness.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Ricci de Turck flow experiments on incomplete surfaces"};
  app.require_subcommand(1);

  std::string config_path;
  auto* run = app.add_subcommand("run", "run the experiment described by a config");
  run->add_option("config", config_path, "experiment config (JSON)")->required();

  app.add_subcommand("list", "list built-in geometries");

  std::string name;
  auto* desc = app.add_subcommand("describe", "print the hypothesis bounds of a geometry");
  desc->add_option("name", name, "geometry name")->required();

  std::string csv_path, audit_config;
  auto* audit = app.add_subcommand("audit", "re-run the snapshot auditors on a snapshots CSV");
  audit->add_option("snapshots", csv_path, "snapshots.csv from a previous run")->required();
  audit->add_option("--config", audit_config, "config the snapshots were produced with")
      ->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      const auto outcome = rdt::run_experiment(rdt::parse_config(config_path));
      if (outcome.exit_code != 0) {
        std::cerr << fmt::format("guard abort, see {}\n",
                                 (outcome.directory / "error.json").string());
        return outcome.exit_code;
      }
      std::cout << fmt::format("{}: {}\n", (outcome.directory / "report.json").string(),
                               outcome.pass ? "PASS" : "FAIL");
      return outcome.pass ? 0 : 3;
    }
    if (app.got_subcommand("list")) {
      std::cout << rdt::list_experiments();
      return 0;
    }
    if (desc->parsed()) {
      std::cout << rdt::describe(name);
      return 0;
    }
    if (audit->parsed()) {
      const auto outcome = rdt::audit_snapshots(csv_path, rdt::parse_config(audit_config));
      std::cout << fmt::format("{}: {}\n", (outcome.directory / "audit_report.json").string(),
                               outcome.pass ? "PASS" : "FAIL");
      return outcome.pass ? 0 : 3;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
