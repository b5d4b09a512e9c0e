// Command-line front end: runs an experiment preset and writes its tables.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "icim/experiment.hpp"

namespace {

// "key=value" with the value read as JSON, or as a plain string when it is not.
void add_override(nlohmann::json& overrides, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw icim::ConfigError(assignment, "expected key=value");
  const std::string key = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  nlohmann::json value = nlohmann::json::parse(text, nullptr, false);
  overrides[key] = value.is_discarded() ? nlohmann::json(text) : value;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Intercell interference analysis and simulation"};
  icim::ExperimentSpec spec;
  std::string config_path;
  std::vector<std::string> sets;
  std::string schemes;
  bool no_simulation = false;
  bool no_analytic = false;
  app.add_option("--preset", spec.preset, "fig2 | fig3 | fig4 | fig5 | fig6 | fig7 | custom")
      ->check(CLI::IsMember(icim::preset_names()));
  app.add_option("--config", config_path, "flat JSON configuration file");
  app.add_option("--set", sets, "override a configuration key, key=value (repeatable)");
  app.add_option("--trials", spec.trials, "Monte Carlo trials per run")->check(CLI::PositiveNumber);
  app.add_option("--seed", spec.seed, "master seed");
  app.add_option("--out", spec.out_dir, "output directory");
  app.add_option("--schemes", schemes, "comma-separated list: greedy,pf,rr,lrr,grr");
  app.add_option("--workers", spec.workers, "simulation threads")->check(CLI::PositiveNumber);
  app.add_flag("--no-simulation", no_simulation, "analytic results only");
  app.add_flag("--no-analytic", no_analytic, "simulation results only");
  CLI11_PARSE(app, argc, argv);

  spec.simulate = !no_simulation;
  spec.analytic = !no_analytic;
  try {
    if (!config_path.empty()) {
      // Validates the file on its own before the overrides are merged.
      spec.overrides = icim::load_config(config_path).values;
    }
    for (const std::string& s : sets) add_override(spec.overrides, s);
    std::stringstream list(schemes);
    for (std::string name; std::getline(list, name, ',');) {
      if (!name.empty()) spec.schemes.push_back(name);
    }
    const icim::ExperimentResult result = icim::run_experiment(spec);
    for (const auto& [name, table] : result.tables) std::cout << (spec.out_dir / name).string() << '\n';
    return 0;
  } catch (const std::exception& e) {
    const nlohmann::json record = icim::error_record(e);
    std::cerr << record.dump() << '\n';
    std::error_code ec;
    std::filesystem::create_directories(spec.out_dir, ec);
    std::ofstream out(spec.out_dir / "error.json");
    if (out) out << record.dump(2) << '\n';
    return record["type"] == "config" ? 2 : 1;
  }
}
