#include "icim/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <memory>
#include <optional>
#include <set>
#include <sstream>

#include "icim/interference.hpp"
#include "icim/metrics.hpp"
#include "icim/montecarlo.hpp"

namespace icim {

using nlohmann::json;

namespace {

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

// --- configuration --------------------------------------------------------

double get_number(const json& values, const std::string& key) {
  const json& v = values.at(key);
  if (!v.is_number()) throw ConfigError(key, "expected a number, got " + v.dump());
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ConfigError(key, "must be finite");
  return x;
}

double get_positive(const json& values, const std::string& key) {
  const double x = get_number(values, key);
  if (!(x > 0.0)) throw ConfigError(key, "must be positive");
  return x;
}

int get_int(const json& values, const std::string& key, int min) {
  const json& v = values.at(key);
  if (!v.is_number_integer()) throw ConfigError(key, "expected an integer, got " + v.dump());
  const long long x = v.get<long long>();
  if (x < min || x > 1000000000LL) throw ConfigError(key, "must be at least " + std::to_string(min));
  return static_cast<int>(x);
}

std::vector<double> get_numbers(const json& values, const std::string& key, bool positive) {
  const json& v = values.at(key);
  if (!v.is_array() || v.empty()) throw ConfigError(key, "expected a non-empty list of numbers");
  std::vector<double> out;
  for (const json& item : v) {
    if (!item.is_number()) throw ConfigError(key, "expected a number, got " + item.dump());
    const double x = item.get<double>();
    if (!std::isfinite(x) || (positive && !(x > 0.0))) throw ConfigError(key, "entries must be positive and finite");
    out.push_back(x);
  }
  return out;
}

std::vector<int> get_ints(const json& values, const std::string& key, int min) {
  const json& v = values.at(key);
  if (!v.is_array() || v.empty()) throw ConfigError(key, "expected a non-empty list of integers");
  std::vector<int> out;
  for (const json& item : v) {
    if (!item.is_number_integer()) throw ConfigError(key, "expected an integer, got " + item.dump());
    const long long x = item.get<long long>();
    if (x < min || x > 1000000000LL) throw ConfigError(key, "entries must be at least " + std::to_string(min));
    out.push_back(static_cast<int>(x));
  }
  return out;
}

ChannelModel get_channel(const json& values, const std::string& prefix) {
  const json& model = values.at(prefix + "_model");
  if (!model.is_string()) throw ConfigError(prefix + "_model", "expected a string");
  const std::string name = model.get<std::string>();
  if (name == "exponential") return make_exponential(get_positive(values, prefix + "_rate"));
  if (name == "gamma") {
    return make_gamma(get_positive(values, prefix + "_shape"), get_positive(values, prefix + "_scale"));
  }
  if (name == "generalized_k") {
    return make_generalized_k(get_positive(values, prefix + "_m_c"), get_positive(values, prefix + "_m_s"),
                              get_positive(values, prefix + "_omega"));
  }
  throw ConfigError(prefix + "_model", "expected exponential, gamma or generalized_k, got '" + name + "'");
}

// --- tables ---------------------------------------------------------------

struct Series {
  std::string label;
  Scheme scheme;
  int slots;  // 0: not slot-based; location RR uses every ring
};

std::vector<Series> expand(const std::vector<Scheme>& schemes, const ExperimentConfig& cfg) {
  std::vector<Series> out;
  for (Scheme s : schemes) {
    if (s == Scheme::GreedyRoundRobin) {
      for (int w : cfg.greedy_rr_slots) out.push_back({"grr_w" + std::to_string(w), s, w});
    } else {
      out.push_back({to_string(s), s, 0});
    }
  }
  return out;
}

std::string cell(std::optional<double> value) { return value ? format_number(*value) : std::string(); }

// Analytic model at one network configuration.
class Analytic {
 public:
  Analytic(const ExperimentConfig& cfg, const NetworkConfig& net, const ChannelModel& chi)
      : cfg_(cfg),
        net_(net),
        chi_(chi),
        grid_(build_ring_grid(net, cfg.kappa_db)),
        angular_(build_angular_grid(cfg.angles)),
        segments_(build_segment_grid(net, cfg.segments)) {}

  const RingGrid& grid() const { return grid_; }

  int slots(const Series& s) const { return s.scheme == Scheme::LocationRoundRobin ? grid_.size() : s.slots; }

  LocationPmf pmf(Scheme scheme, int slot) {
    switch (scheme) {
      case Scheme::Greedy: return greedy_pmf(grid_, cfg_.zeta, net_);
      case Scheme::ProportionalFair: return proportional_fair_pmf(grid_, cfg_.zeta, net_);
      case Scheme::RoundRobin: return round_robin_pmf(grid_);
      case Scheme::LocationRoundRobin: return location_rr_pmf(grid_, slot);
      case Scheme::GreedyRoundRobin: return sweep().pmf(slot);
    }
    return {};
  }

  InterfererDistancePmf interferer(Scheme scheme, int slot) {
    return interferer_pmf(joint_pmf_with_angle(pmf(scheme, slot), angular_), segments_, net_.bs_distance);
  }

  InterferenceTransform transform(Scheme scheme, int slot) {
    return cumulative_transform(interferer(scheme, slot), chi_, net_);
  }

  SignalLaw signal(Scheme scheme, int slot) {
    if (scheme == Scheme::GreedyRoundRobin) return signal_law(sweep(), slot, grid_, cfg_.zeta, net_);
    return signal_law(pmf(scheme, slot), grid_, cfg_.zeta, net_);
  }

  double capacity(const Series& s) {
    auto one = [&](int slot) {
      return ergodic_capacity(signal(s.scheme, slot), transform(s.scheme, slot), 1.0, cfg_.laguerre_order,
                              cfg_.laguerre_check_order)
          .value;
    };
    if (s.scheme == Scheme::GreedyRoundRobin || s.scheme == Scheme::LocationRoundRobin) {
      return slot_average(one, slots(s));
    }
    return one(0);
  }

  double fairness(const Series& s) {
    switch (s.scheme) {
      case Scheme::LocationRoundRobin:
        return slot_average([&](int w) { return location_rr_fairness(grid_, w); }, slots(s));
      case Scheme::GreedyRoundRobin:
        return slot_average([&](int w) { return greedy_rr_fairness(sweep(), grid_, w); }, slots(s));
      default: return average_fairness(pmf(s.scheme, 0), grid_, grid_.total_users()).value;
    }
  }

 private:
  const GreedyRoundRobin& sweep() {
    if (!sweep_) {
      const int w = *std::max_element(cfg_.greedy_rr_slots.begin(), cfg_.greedy_rr_slots.end());
      if (w > grid_.size()) {
        throw ConfigError("W_list", "greedy round robin needs at most " + std::to_string(grid_.size()) + " slots");
      }
      sweep_ = std::make_unique<GreedyRoundRobin>(grid_, cfg_.zeta, net_, w);
    }
    return *sweep_;
  }

  const ExperimentConfig& cfg_;
  NetworkConfig net_;
  ChannelModel chi_;
  RingGrid grid_;
  AngularGrid angular_;
  SegmentGrid segments_;
  std::unique_ptr<GreedyRoundRobin> sweep_;
};

double empirical_capacity(const SimulationReport& report, const Series& s, int slots) {
  if (s.scheme == Scheme::GreedyRoundRobin || s.scheme == Scheme::LocationRoundRobin) {
    return report.slot_average_capacity(s.scheme, slots);
  }
  return report.at(s.scheme).capacity;
}

double empirical_fairness(const SimulationReport& report, const Series& s, int slots) {
  if (s.scheme == Scheme::GreedyRoundRobin || s.scheme == Scheme::LocationRoundRobin) {
    return report.slot_average_fairness(s.scheme, slots);
  }
  return report.at(s.scheme).fairness;
}

class Runner {
 public:
  Runner(const ExperimentSpec& spec, const ExperimentConfig& cfg) : spec_(spec), cfg_(cfg) {
    comments_ = {"preset " + spec.preset, "seed " + std::to_string(spec.seed), "trials " + std::to_string(spec.trials),
                 "config " + cfg.values.dump()};
    summary_ = table();
  }

  Table curve() const {
    Table t;
    t.comments = comments_;
    t.columns = {"x", "analytic", "empirical", "abs_err"};
    return t;
  }

  Table table() const {
    Table t;
    t.comments = comments_;
    t.columns = {"param", "scheme", "value"};
    return t;
  }

  static void add_point(Table& t, double x, std::optional<double> analytic, std::optional<double> empirical) {
    std::optional<double> err;
    if (analytic && empirical) err = std::abs(*analytic - *empirical);
    t.add_row({format_number(x), cell(analytic), cell(empirical), cell(err)});
  }

  void summarize(const std::string& param, const std::string& scheme, double value) {
    summary_.add_row({param, scheme, format_number(value)});
  }

  void emit(const std::string& name, Table t) { result_.tables[name] = std::move(t); }

  SimulationReport simulate(const NetworkConfig& net, const RingGrid& grid, const std::vector<Series>& series,
                            const ChannelModel& chi, bool keep_ici) {
    std::vector<Scheme> schemes;
    int sweep = 1;
    for (const Series& s : series) {
      if (std::find(schemes.begin(), schemes.end(), s.scheme) == schemes.end()) schemes.push_back(s.scheme);
      if (s.scheme == Scheme::GreedyRoundRobin) sweep = std::max(sweep, s.slots);
    }
    if (sweep > grid.size()) {
      throw ConfigError("W_list", "greedy round robin needs at most " + std::to_string(grid.size()) + " slots");
    }
    SimulationOptions options;
    options.workers = spec_.workers;
    options.segments = cfg_.segments;
    for (double q : cfg_.q_db) options.thresholds.push_back(db_to_linear(q));
    options.greedy_rr_slots = sweep;
    options.keep_ici = keep_ici;
    const std::uint64_t seed = trial_seed(spec_.seed, runs_++);
    return run_trials(net, grid, schemes, chi, cfg_.zeta, spec_.trials, seed, options);
  }

  ExperimentResult finish() {
    emit(spec_.preset + "_summary.csv", summary_);
    return std::move(result_);
  }

 private:
  const ExperimentSpec& spec_;
  const ExperimentConfig& cfg_;
  std::vector<std::string> comments_;
  Table summary_;
  ExperimentResult result_;
  std::uint64_t runs_ = 0;
};

void require_plain(const std::vector<Series>& series, const std::string& preset) {
  for (const Series& s : series) {
    if (is_slot_based(s.scheme)) {
      throw ConfigError("schemes", preset + " supports greedy, pf and rr only, got " + s.label);
    }
  }
}

// Location PMF of the serving cell's scheduled user.
void run_location(Runner& run, const ExperimentSpec& spec, const ExperimentConfig& cfg,
                  const std::vector<Series>& series, const std::string& prefix) {
  Analytic model(cfg, cfg.network, cfg.chi);
  std::optional<SimulationReport> report;
  if (spec.simulate) report = run.simulate(cfg.network, model.grid(), series, cfg.chi, false);
  for (const Series& s : series) {
    Table t = run.curve();
    std::optional<Eigen::VectorXd> analytic;
    if (spec.analytic) analytic = model.pmf(s.scheme, 0).masses;
    const Eigen::VectorXd* empirical = report ? &report->at(s.scheme).location_pmf : nullptr;
    for (int k = 0; k < model.grid().size(); ++k) {
      Runner::add_point(t, model.grid().radii[k], analytic ? std::optional<double>((*analytic)[k]) : std::nullopt,
                        empirical ? std::optional<double>((*empirical)[k]) : std::nullopt);
    }
    if (analytic && empirical) run.summarize("tv", s.label, total_variation(*analytic, *empirical));
    run.emit(prefix + "_location_pmf_" + s.label + ".csv", std::move(t));
  }
}

// Distance from interfering users to the reference base station.
void run_interferer(Runner& run, const ExperimentSpec& spec, const ExperimentConfig& cfg,
                    const std::vector<Series>& series) {
  Analytic model(cfg, cfg.network, cfg.chi);
  const SegmentGrid segments = build_segment_grid(cfg.network, cfg.segments);
  const int quartile = std::max(1, segments.size() / 4);
  std::optional<SimulationReport> report;
  if (spec.simulate) report = run.simulate(cfg.network, model.grid(), series, cfg.chi, false);
  for (const Series& s : series) {
    Table t = run.curve();
    std::optional<Eigen::VectorXd> analytic;
    if (spec.analytic) analytic = model.interferer(s.scheme, 0).masses;
    const Eigen::VectorXd* empirical = report ? &report->at(s.scheme).interferer_pmf : nullptr;
    for (int m = 0; m < segments.size(); ++m) {
      Runner::add_point(t, segments.centers[m], analytic ? std::optional<double>((*analytic)[m]) : std::nullopt,
                        empirical ? std::optional<double>((*empirical)[m]) : std::nullopt);
    }
    if (analytic) run.summarize("near_quartile_mass_analytic", s.label, analytic->head(quartile).sum());
    if (empirical) run.summarize("near_quartile_mass_empirical", s.label, empirical->head(quartile).sum());
    if (analytic && empirical) run.summarize("tv", s.label, total_variation(*analytic, *empirical));
    run.emit("fig3_interferer_pmf_" + s.label + ".csv", std::move(t));
  }
}

// CDF of the cumulative interference over the L and beta lists.
void run_ici(Runner& run, const ExperimentSpec& spec, const ExperimentConfig& cfg, const std::vector<Series>& series) {
  for (int cells : cfg.cells_list) {
    for (double beta : cfg.beta_list) {
      NetworkConfig net = cfg.network;
      net.num_interferers = cells;
      net.beta = beta;
      Analytic model(cfg, net, cfg.chi);
      std::optional<SimulationReport> report;
      if (spec.simulate) report = run.simulate(net, model.grid(), series, cfg.chi, true);
      const std::string tag = "L" + std::to_string(cells) + "_beta" + format_number(beta);
      for (const Series& s : series) {
        std::optional<InterferenceTransform> transform;
        if (spec.analytic) transform = model.transform(s.scheme, 0);
        const std::vector<double>* samples = report ? &report->at(s.scheme).ici : nullptr;
        // Abscissae at empirical quantiles when samples exist, else log-spaced around the mean.
        const int n = cfg.cdf_points;
        std::vector<double> xs;
        if (samples && cells > 0) {
          std::vector<double> sorted = *samples;
          std::sort(sorted.begin(), sorted.end());
          for (int j = 1; j <= n; ++j) {
            const auto idx = static_cast<std::size_t>(std::floor(static_cast<double>(j) / (n + 1) * sorted.size()));
            xs.push_back(sorted[std::min(idx, sorted.size() - 1)]);
          }
          xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
        } else {
          const double m = transform && transform->mean() > 0.0 ? transform->mean() : 1.0;
          for (int j = 0; j < n; ++j) xs.push_back(m * 1e-2 * std::pow(2000.0, static_cast<double>(j) / (n - 1)));
        }
        const Eigen::VectorXd grid = Eigen::Map<const Eigen::VectorXd>(xs.data(), static_cast<Eigen::Index>(xs.size()));
        std::optional<Eigen::VectorXd> analytic;
        if (transform) analytic = transform_to_cdf(*transform, grid);
        std::optional<Eigen::VectorXd> empirical;
        if (samples) empirical = empirical_cdf(*samples, grid);
        Table t = run.curve();
        for (Eigen::Index i = 0; i < grid.size(); ++i) {
          Runner::add_point(t, grid[i], analytic ? std::optional<double>((*analytic)[i]) : std::nullopt,
                            empirical ? std::optional<double>((*empirical)[i]) : std::nullopt);
        }
        if (analytic && samples) run.summarize("ks_" + tag, s.label, ks_distance(*samples, grid, *analytic));
        run.emit("fig4_ici_cdf_" + s.label + "_" + tag + ".csv", std::move(t));
      }
    }
  }
}

// Capacity and fairness tables over a list of user counts.
void run_capacity(Runner& run, const ExperimentSpec& spec, const ExperimentConfig& cfg,
                  const std::vector<Series>& series, const std::vector<int>& users, const std::string& prefix,
                  bool fairness) {
  Table cap_a = run.table();
  Table cap_e = run.table();
  Table fair_a = run.table();
  Table fair_e = run.table();
  for (int u : users) {
    NetworkConfig net = cfg.network;
    net.num_users = u;
    Analytic model(cfg, net, cfg.chi);
    std::optional<SimulationReport> report;
    if (spec.simulate) report = run.simulate(net, model.grid(), series, cfg.chi, false);
    const std::string param = std::to_string(u);
    for (const Series& s : series) {
      const int slots = model.slots(s);
      std::optional<double> a;
      std::optional<double> e;
      if (spec.analytic) {
        a = model.capacity(s);
        cap_a.add_row({param, s.label, format_number(*a)});
      }
      if (report) {
        e = empirical_capacity(*report, s, slots);
        cap_e.add_row({param, s.label, format_number(*e)});
      }
      if (a && e) run.summarize("capacity_rel_err_U" + param, s.label, std::abs(*a - *e) / std::abs(*a));
      if (!fairness) continue;
      std::optional<double> fa;
      std::optional<double> fe;
      if (spec.analytic) {
        fa = model.fairness(s);
        fair_a.add_row({param, s.label, format_number(*fa)});
      }
      if (report) {
        fe = empirical_fairness(*report, s, slots);
        fair_e.add_row({param, s.label, format_number(*fe)});
      }
      if (fa && fe) run.summarize("fairness_abs_err_U" + param, s.label, std::abs(*fa - *fe));
    }
  }
  if (spec.analytic) run.emit(prefix + "_capacity_analytic.csv", std::move(cap_a));
  if (spec.simulate) run.emit(prefix + "_capacity_empirical.csv", std::move(cap_e));
  if (fairness && spec.analytic) run.emit(prefix + "_fairness_analytic.csv", std::move(fair_a));
  if (fairness && spec.simulate) run.emit(prefix + "_fairness_empirical.csv", std::move(fair_e));
}

// Outage probability against the threshold list, per user count.
void run_outage(Runner& run, const ExperimentSpec& spec, const ExperimentConfig& cfg,
                const std::vector<Series>& series, const std::vector<int>& users, const std::string& prefix) {
  for (int u : users) {
    NetworkConfig net = cfg.network;
    net.num_users = u;
    Analytic model(cfg, net, cfg.chi);
    std::optional<SimulationReport> report;
    if (spec.simulate) report = run.simulate(net, model.grid(), series, cfg.chi, false);
    for (const Series& s : series) {
      std::optional<SignalLaw> signal;
      std::optional<InterferenceTransform> transform;
      if (spec.analytic) {
        signal = model.signal(s.scheme, 0);
        transform = model.transform(s.scheme, 0);
      }
      Table t = run.curve();
      double worst = 0.0;
      for (std::size_t j = 0; j < cfg.q_db.size(); ++j) {
        std::optional<double> a;
        std::optional<double> e;
        if (signal) a = outage_probability(db_to_linear(cfg.q_db[j]), *signal, *transform);
        if (report) e = report->at(s.scheme).outage[static_cast<Eigen::Index>(j)];
        if (a && e) worst = std::max(worst, std::abs(*a - *e));
        Runner::add_point(t, cfg.q_db[j], a, e);
      }
      if (spec.analytic && report) run.summarize("outage_max_abs_err_U" + std::to_string(u), s.label, worst);
      run.emit(prefix + "_outage_" + s.label + "_U" + std::to_string(u) + ".csv", std::move(t));
    }
  }
}

// Capacity against the interfering channel's shadowing shape and mean power.
void run_channel_sweep(Runner& run, const ExperimentSpec& spec, const ExperimentConfig& cfg,
                       const std::vector<Series>& series) {
  Table cap_a = run.table();
  Table cap_e = run.table();
  for (double m_s : cfg.shadowing_list) {
    for (double omega : cfg.omega_list) {
      const ChannelModel chi = make_gamma(m_s, omega / m_s);
      Analytic model(cfg, cfg.network, chi);
      std::optional<SimulationReport> report;
      if (spec.simulate) report = run.simulate(cfg.network, model.grid(), series, chi, false);
      const std::string param = "ms" + format_number(m_s) + "_omega" + format_number(omega);
      for (const Series& s : series) {
        std::optional<double> a;
        std::optional<double> e;
        if (spec.analytic) {
          a = model.capacity(s);
          cap_a.add_row({param, s.label, format_number(*a)});
        }
        if (report) {
          e = empirical_capacity(*report, s, model.slots(s));
          cap_e.add_row({param, s.label, format_number(*e)});
        }
        if (a && e) run.summarize("capacity_rel_err_" + param, s.label, std::abs(*a - *e) / std::abs(*a));
      }
    }
  }
  if (spec.analytic) run.emit("fig7_capacity_analytic.csv", std::move(cap_a));
  if (spec.simulate) run.emit("fig7_capacity_empirical.csv", std::move(cap_e));
}

std::vector<Scheme> preset_schemes(const std::string& preset) {
  if (preset == "fig4") return {Scheme::Greedy};
  if (preset == "fig2" || preset == "fig3") return {Scheme::Greedy, Scheme::ProportionalFair, Scheme::RoundRobin};
  return {Scheme::Greedy, Scheme::ProportionalFair, Scheme::RoundRobin, Scheme::LocationRoundRobin,
          Scheme::GreedyRoundRobin};
}

std::vector<Series> plain(const std::vector<Series>& series) {
  std::vector<Series> out;
  for (const Series& s : series) {
    if (!is_slot_based(s.scheme)) out.push_back(s);
  }
  return out;
}

std::string utc_now() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

void write_json(const json& doc, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << doc.dump(2) << '\n';
}

}  // namespace

json default_config_values() {
  json v = json::object();
  v["R"] = 500.0;
  v["beta"] = 2.6;
  v["kappa_db"] = 2.0;
  v["U"] = 50;
  v["C_db"] = 60.0;
  v["P_max"] = 1.0;
  v["sigma2_dbm"] = -174.0;
  v["bandwidth_hz"] = 0.0;
  v["I"] = 180;
  v["M"] = 20;
  v["L"] = 6;
  v["D"] = 1000.0;
  for (const std::string prefix : {"zeta", "chi"}) {
    v[prefix + "_model"] = "gamma";
    v[prefix + "_shape"] = 1.5;
    v[prefix + "_scale"] = 2.0 / 3.0;
    v[prefix + "_rate"] = 1.0;
    v[prefix + "_m_c"] = 1.0;
    v[prefix + "_m_s"] = 1.0;
    v[prefix + "_omega"] = 1.0;
  }
  v["q_db"] = {-10.0, -5.0, 0.0, 5.0, 10.0};
  v["U_list"] = {10, 50, 100};
  v["outage_U_list"] = {50, 100};
  v["L_list"] = {1, 3, 6};
  v["beta_list"] = {2.2, 2.6, 3.0};
  v["W_list"] = {3, 6};
  v["omega_list"] = {1.0, 2.0, 3.0};
  v["m_s_list"] = {1.0, 1.5, 3.0};
  v["laguerre_order"] = 24;
  v["laguerre_check_order"] = 32;
  v["cdf_points"] = 199;
  return v;
}

ExperimentConfig resolve_config(const json& overrides) {
  if (!overrides.is_object()) throw ConfigError("<document>", "expected a flat JSON object");
  ExperimentConfig cfg;
  cfg.values = default_config_values();
  for (const auto& [key, value] : overrides.items()) {
    if (!cfg.values.contains(key)) throw ConfigError(key, "unknown key");
    if (value.is_object()) throw ConfigError(key, "nested objects are not supported");
    cfg.values[key] = value;
  }
  const json& v = cfg.values;

  NetworkConfig& net = cfg.network;
  net.radius = get_positive(v, "R");
  net.beta = get_positive(v, "beta");
  net.num_users = get_int(v, "U", 1);
  net.c_pl = db_to_linear(get_number(v, "C_db"));
  net.p_max = get_positive(v, "P_max");
  const double bandwidth = get_number(v, "bandwidth_hz");
  if (bandwidth < 0.0) throw ConfigError("bandwidth_hz", "must be non-negative");
  // The dBm figure is a total noise power unless a bandwidth turns it into N0 * B.
  net.sigma2 = db_to_linear(get_number(v, "sigma2_dbm") - 30.0) * (bandwidth > 0.0 ? bandwidth : 1.0);
  net.num_interferers = get_int(v, "L", 0);
  net.bs_distance = get_positive(v, "D");
  if (!(net.bs_distance > net.radius)) throw ConfigError("D", "must exceed R");

  cfg.kappa_db = get_positive(v, "kappa_db");
  cfg.angles = get_int(v, "I", 1);
  cfg.segments = get_int(v, "M", 1);
  try {
    cfg.zeta = get_channel(v, "zeta");
  } catch (const ConfigError&) {
    throw;
  } catch (const InvalidArgument& e) {
    throw ConfigError("zeta_model", e.what());
  }
  try {
    cfg.chi = get_channel(v, "chi");
  } catch (const ConfigError&) {
    throw;
  } catch (const InvalidArgument& e) {
    throw ConfigError("chi_model", e.what());
  }
  cfg.q_db = get_numbers(v, "q_db", false);
  cfg.users_list = get_ints(v, "U_list", 1);
  cfg.outage_users_list = get_ints(v, "outage_U_list", 1);
  cfg.cells_list = get_ints(v, "L_list", 0);
  cfg.beta_list = get_numbers(v, "beta_list", true);
  cfg.greedy_rr_slots = get_ints(v, "W_list", 1);
  cfg.omega_list = get_numbers(v, "omega_list", true);
  cfg.shadowing_list = get_numbers(v, "m_s_list", true);
  cfg.laguerre_order = get_int(v, "laguerre_order", 1);
  cfg.laguerre_check_order = get_int(v, "laguerre_check_order", 1);
  if (cfg.laguerre_order > 64) throw ConfigError("laguerre_order", "must be at most 64");
  if (cfg.laguerre_check_order > 64) throw ConfigError("laguerre_check_order", "must be at most 64");
  cfg.cdf_points = get_int(v, "cdf_points", 2);
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("<file>", "cannot open " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();
  if (text.find_first_not_of(" \t\r\n") == std::string::npos) return resolve_config(json::object());
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("<file>", std::string("malformed JSON: ") + e.what());
  }
  return resolve_config(doc);
}

void Table::add_row(std::vector<std::string> cells) {
  if (cells.size() != columns.size()) throw InvalidArgument("table row has the wrong number of cells");
  rows.push_back(std::move(cells));
}

std::size_t Table::column(const std::string& name) const {
  const auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) throw InvalidArgument("table has no column '" + name + "'");
  return static_cast<std::size_t>(it - columns.begin());
}

double Table::number(std::size_t row, const std::string& name) const {
  const std::string& text = rows.at(row).at(column(name));
  if (text.empty()) return std::nan("");
  return std::stod(text);
}

std::size_t Table::find(const std::vector<std::pair<std::string, std::string>>& keys) const {
  for (std::size_t r = 0; r < rows.size(); ++r) {
    bool match = true;
    for (const auto& [name, value] : keys) match = match && rows[r][column(name)] == value;
    if (match) return r;
  }
  throw InvalidArgument("table has no matching row");
}

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buffer[32];
  for (int precision = 15; precision <= 17; ++precision) {
    std::snprintf(buffer, sizeof buffer, "%.*g", precision, value);
    if (std::strtod(buffer, nullptr) == value) break;
  }
  return buffer;
}

void write_csv(const Table& table, const std::filesystem::path& path) {
  std::ostringstream os;
  for (const std::string& c : table.comments) os << "# " << c << '\n';
  auto line = [&os](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (cells[i].find_first_of(",\n\r") != std::string::npos) {
        throw InvalidArgument("csv cell contains a separator: " + cells[i]);
      }
      os << (i ? "," : "") << cells[i];
    }
    os << '\n';
  };
  line(table.columns);
  for (const auto& row : table.rows) line(row);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << os.str();
}

Table read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  Table table;
  std::string text;
  bool header = false;
  auto split = [](const std::string& s) {
    std::vector<std::string> cells;
    std::size_t start = 0;
    for (;;) {
      const std::size_t comma = s.find(',', start);
      cells.push_back(s.substr(start, comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    return cells;
  };
  while (std::getline(in, text)) {
    if (!header && text.rfind("# ", 0) == 0) {
      table.comments.push_back(text.substr(2));
    } else if (!header) {
      table.columns = split(text);
      header = true;
    } else {
      table.add_row(split(text));
    }
  }
  if (!header) throw Error("csv without a header row: " + path.string());
  return table;
}

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = {"fig2", "fig3", "fig4", "fig5", "fig6", "fig7", "custom"};
  return names;
}

ExperimentResult run_experiment(const ExperimentSpec& spec) {
  const auto started = std::chrono::steady_clock::now();
  const std::string started_utc = utc_now();
  const auto& names = preset_names();
  if (std::find(names.begin(), names.end(), spec.preset) == names.end()) {
    throw ConfigError("preset", "unknown preset '" + spec.preset + "'");
  }
  if (spec.trials < 1) throw ConfigError("trials", "must be at least 1");
  if (spec.workers < 1) throw ConfigError("workers", "must be at least 1");
  if (!spec.simulate && !spec.analytic) throw ConfigError("mode", "both simulation and analysis are disabled");
  const ExperimentConfig cfg = resolve_config(spec.overrides);

  std::vector<Scheme> schemes;
  for (const std::string& name : spec.schemes) {
    Scheme s;
    try {
      s = scheme_from_string(name);
    } catch (const InvalidArgument& e) {
      throw ConfigError("schemes", e.what());
    }
    if (std::find(schemes.begin(), schemes.end(), s) == schemes.end()) schemes.push_back(s);
  }
  if (schemes.empty()) schemes = preset_schemes(spec.preset);
  const std::vector<Series> series = expand(schemes, cfg);

  Runner run(spec, cfg);
  const std::string& p = spec.preset;
  if (p == "fig2") {
    require_plain(series, p);
    run_location(run, spec, cfg, series, "fig2");
  } else if (p == "fig3") {
    require_plain(series, p);
    run_interferer(run, spec, cfg, series);
  } else if (p == "fig4") {
    require_plain(series, p);
    run_ici(run, spec, cfg, series);
  } else if (p == "fig5") {
    run_capacity(run, spec, cfg, series, cfg.users_list, "fig5", false);
  } else if (p == "fig6") {
    if (!plain(series).empty()) run_outage(run, spec, cfg, plain(series), cfg.outage_users_list, "fig6");
    run_capacity(run, spec, cfg, series, cfg.outage_users_list, "fig6", true);
  } else if (p == "fig7") {
    run_channel_sweep(run, spec, cfg, series);
  } else {
    if (!plain(series).empty()) {
      run_location(run, spec, cfg, plain(series), "custom");
      run_outage(run, spec, cfg, plain(series), {cfg.network.num_users}, "custom");
    }
    run_capacity(run, spec, cfg, series, {cfg.network.num_users}, "custom", true);
  }
  ExperimentResult result = run.finish();

  std::filesystem::create_directories(spec.out_dir);
  json files = json::array();
  for (const auto& [name, table] : result.tables) {
    write_csv(table, spec.out_dir / name);
    files.push_back({{"name", name}, {"rows", table.rows.size()}});
  }
  json labels = json::array();
  for (const Series& s : series) labels.push_back(s.label);
  result.manifest = {{"preset", spec.preset}, {"seed", spec.seed},        {"trials", spec.trials},
                     {"simulate", spec.simulate}, {"analytic", spec.analytic}, {"schemes", labels},
                     {"config", cfg.values},   {"files", files}};
  write_json(result.manifest, spec.out_dir / "run_manifest.json");
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  write_json({{"started_utc", started_utc}, {"elapsed_seconds", elapsed}, {"workers", spec.workers}},
             spec.out_dir / "run_metadata.json");
  return result;
}

json error_record(const std::exception& error) {
  json record = {{"status", "error"}, {"message", error.what()}};
  if (const auto* e = dynamic_cast<const ConfigError*>(&error)) {
    record["type"] = "config";
    record["key"] = e->key();
  } else if (dynamic_cast<const ConvergenceError*>(&error)) {
    record["type"] = "convergence";
  } else if (dynamic_cast<const DomainError*>(&error)) {
    record["type"] = "domain";
  } else if (dynamic_cast<const BudgetExceeded*>(&error)) {
    record["type"] = "budget";
  } else if (dynamic_cast<const InvalidArgument*>(&error)) {
    record["type"] = "invalid_argument";
  } else {
    record["type"] = "internal";
  }
  return record;
}

}  // namespace icim
