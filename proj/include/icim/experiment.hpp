#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "icim/error.hpp"
#include "icim/fading.hpp"
#include "icim/geometry.hpp"
#include "icim/scheduling.hpp"

namespace icim {

/// A configuration value that is unknown, mistyped or out of range. `key()`
/// names the offending entry.
class ConfigError : public InvalidArgument {
 public:
  ConfigError(const std::string& key, const std::string& what)
      : InvalidArgument("config key '" + key + "': " + what), key_(key) {}

  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

/// Fully resolved experiment configuration. `values` holds the flat document
/// as given (user units, dB where applicable) with every default filled in;
/// the typed fields are derived from it.
struct ExperimentConfig {
  nlohmann::json values;

  NetworkConfig network;
  double kappa_db = 2.0;
  int angles = 180;
  int segments = 20;
  ChannelModel zeta;
  ChannelModel chi;
  std::vector<double> q_db;
  std::vector<int> users_list;
  std::vector<int> outage_users_list;
  std::vector<int> cells_list;
  std::vector<double> beta_list;
  std::vector<int> greedy_rr_slots;
  std::vector<double> omega_list;
  std::vector<double> shadowing_list;
  int laguerre_order = 24;
  int laguerre_check_order = 32;
  int cdf_points = 199;
};

/// Default document: R=500 m, beta=2.6, kappa=2 dB, U=50, C=60 dB, P_max=1 W,
/// sigma2=-174 dBm, I=180, M=20, L=6, D=1000 m, zeta = chi = Gamma(3/2, 2/3).
nlohmann::json default_config_values();

/// Merges `overrides` into the defaults and resolves them. Rejects unknown
/// keys, wrong types and non-positive physical quantities with ConfigError.
ExperimentConfig resolve_config(const nlohmann::json& overrides);

/// Reads a flat JSON object from `path` (an empty file means no overrides).
/// Throws ConfigError with key "<file>" on malformed JSON.
ExperimentConfig load_config(const std::filesystem::path& path);

/// Fields of one CSV file: '#' comment lines, a header row and rows of cells.
/// Numbers are stored in their written form, so a table re-read from disk
/// compares equal to the one written.
struct Table {
  std::vector<std::string> comments;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  void add_row(std::vector<std::string> cells);
  std::size_t column(const std::string& name) const;
  /// Cell as a number; NaN for an empty cell.
  double number(std::size_t row, const std::string& name) const;
  /// First row whose cells in the named columns equal the given values; throws when absent.
  std::size_t find(const std::vector<std::pair<std::string, std::string>>& keys) const;

  bool operator==(const Table&) const = default;
};

/// Shortest decimal form that reads back to the same double ("%.17g" based).
std::string format_number(double value);

void write_csv(const Table& table, const std::filesystem::path& path);
Table read_csv(const std::filesystem::path& path);

struct ExperimentSpec {
  /// fig2 .. fig7 or custom.
  std::string preset = "custom";
  nlohmann::json overrides = nlohmann::json::object();
  long trials = 100000;
  std::uint64_t seed = 1;
  std::filesystem::path out_dir = "results";
  /// Scheme names accepted by scheme_from_string; empty means the preset default.
  std::vector<std::string> schemes;
  bool simulate = true;
  bool analytic = true;
  int workers = 1;
};

struct ExperimentResult {
  /// Every emitted table by file name, including "<preset>_summary.csv".
  std::map<std::string, Table> tables;
  nlohmann::json manifest;
};

/// Names accepted for `ExperimentSpec::preset`.
const std::vector<std::string>& preset_names();

/// Runs a preset and writes its tables, `run_manifest.json` (reproducible) and
/// `run_metadata.json` (timing, worker count) to `spec.out_dir`. Curve files
/// have columns x, analytic, empirical, abs_err; tables have param, scheme,
/// value. Every CSV starts with comment lines carrying the preset, seed, trial
/// count and the resolved configuration.
ExperimentResult run_experiment(const ExperimentSpec& spec);

/// Machine-readable record of a failure, written as error.json by the CLI.
nlohmann::json error_record(const std::exception& error);

}  // namespace icim
