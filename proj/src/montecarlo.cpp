#include "icim/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <numbers>
#include <random>
#include <thread>

#include "icim/error.hpp"
#include "icim/metrics.hpp"

namespace icim {
namespace {

// Trials per reduction block; fixed so the summation order never depends on
// the worker count.
constexpr long kBlock = 256;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

struct User {
  double r;
  double theta;
  int ring;
};

using Cell = std::vector<User>;
using Rng = std::mt19937_64;

// One slot of one scheme: how it picks a user and whose statistics it feeds.
struct Entry {
  Scheme scheme;
  int slot;
};

struct Accumulator {
  Eigen::VectorXd rings;
  Eigen::VectorXd segments;
  Eigen::VectorXd outage;
  std::map<std::uint64_t, Eigen::VectorXd> contests;  // contender mask -> ring counts
  double capacity = 0.0;
  double ici = 0.0;
  long served = 0;
};

struct Selection {
  int user = -1;
  double gain = 0.0;  // channel draw of the selected user on its own link
};

class Simulator {
 public:
  Simulator(const NetworkConfig& config, const RingGrid& grid, const ChannelModel& chi, const ChannelModel& zeta,
            const SegmentGrid& segments, const std::vector<double>& thresholds)
      : config_(config), grid_(grid), chi_(chi), zeta_(zeta), segments_(segments), thresholds_(thresholds) {
    pf_means_.resize(grid.size());
    for (int k = 0; k < grid.size(); ++k) pf_means_[k] = expected_maximum(zeta, grid.users[k]);
    all_rings_ = grid.size() == 64 ? ~0ULL : (1ULL << grid.size()) - 1;
  }

  Accumulator empty() const {
    Accumulator acc;
    acc.rings = Eigen::VectorXd::Zero(grid_.size());
    acc.segments = Eigen::VectorXd::Zero(segments_.size());
    acc.outage = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(thresholds_.size()));
    return acc;
  }

  Cell drop(Rng& rng) const {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Cell cell(static_cast<std::size_t>(config_.num_users));
    for (User& user : cell) {
      user.r = config_.radius * std::sqrt(unit(rng));
      user.theta = 2.0 * std::numbers::pi * unit(rng);
      user.ring = grid_.ring_of(user.r);
    }
    return cell;
  }

  // Scheduler decision in one cell. `excluded` masks rings already served.
  Selection select(Scheme scheme, int slot, const Cell& cell, std::uint64_t excluded, Rng& rng) const {
    Selection best;
    switch (scheme) {
      case Scheme::Greedy:
      case Scheme::GreedyRoundRobin:
      case Scheme::ProportionalFair: {
        double best_score = -1.0;
        for (std::size_t i = 0; i < cell.size(); ++i) {
          const User& user = cell[i];
          if (user.ring < 0 || (excluded >> user.ring & 1ULL)) continue;
          const double gain = sample(zeta_, rng);
          double score = gain * std::pow(user.r, -config_.beta);
          if (scheme == Scheme::ProportionalFair) {
            score = gain * std::pow(grid_.radii[user.ring] / user.r, config_.beta) / pf_means_[user.ring];
          }
          if (score > best_score) {
            best_score = score;
            best = {static_cast<int>(i), gain};
          }
        }
        return best;
      }
      case Scheme::RoundRobin:
      case Scheme::LocationRoundRobin: {
        std::vector<int> eligible;
        for (std::size_t i = 0; i < cell.size(); ++i) {
          const int ring = cell[i].ring;
          if (ring < 0) continue;
          if (scheme == Scheme::LocationRoundRobin && ring != slot - 1) continue;
          eligible.push_back(static_cast<int>(i));
        }
        if (eligible.empty()) return best;
        std::uniform_int_distribution<std::size_t> pick(0, eligible.size() - 1);
        best.user = eligible[pick(rng)];
        best.gain = sample(zeta_, rng);
        return best;
      }
    }
    return best;
  }

  // One slot across all cells. Updates the per-cell served-ring masks used by
  // greedy round robin, records the statistics and stores Y in `ici`.
  void slot(const Entry& entry, const std::vector<Cell>& cells, std::vector<std::uint64_t>& served, Rng& rng,
            Accumulator& acc, double& ici) const {
    double y = 0.0;
    double x0 = 0.0;
    int serving_ring = -1;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      const Selection pick = select(entry.scheme, entry.slot, cells[c], served[c], rng);
      if (pick.user < 0) continue;
      const User& user = cells[c][static_cast<std::size_t>(pick.user)];
      if (c == 0) {
        serving_ring = user.ring;
        x0 = config_.k_bar() * std::pow(user.r, -config_.beta) * pick.gain;
      } else {
        const double distance = interferer_distance(user.r, user.theta, config_.bs_distance);
        acc.segments[segments_.segment_of(distance)] += 1.0;
        y += config_.k_bar() * std::pow(distance, -config_.beta) * sample(chi_, rng);
      }
      if (entry.scheme == Scheme::GreedyRoundRobin) served[c] |= 1ULL << user.ring;
    }
    ici = y;
    acc.ici += y;
    if (serving_ring < 0) return;
    ++acc.served;
    acc.rings[serving_ring] += 1.0;
    acc.capacity += std::log2(1.0 + x0 / (y + 1.0));
    for (std::size_t j = 0; j < thresholds_.size(); ++j) {
      if (thresholds_[j] * y - x0 >= 0.0) acc.outage[static_cast<Eigen::Index>(j)] += 1.0;
    }
    const std::uint64_t mask = contenders(entry, served[0], serving_ring);
    auto [it, fresh] = acc.contests.try_emplace(mask, Eigen::VectorXd::Zero(grid_.size()));
    it->second[serving_ring] += 1.0;
  }

 private:
  // Rings whose users competed for the slot. For greedy round robin the
  // serving ring has already been added to `served_after`.
  std::uint64_t contenders(const Entry& entry, std::uint64_t served_after, int serving_ring) const {
    switch (entry.scheme) {
      case Scheme::LocationRoundRobin: return 1ULL << (entry.slot - 1);
      case Scheme::GreedyRoundRobin: return (all_rings_ & ~served_after) | (1ULL << serving_ring);
      default: return all_rings_;
    }
  }

  NetworkConfig config_;
  RingGrid grid_;
  ChannelModel chi_;
  ChannelModel zeta_;
  SegmentGrid segments_;
  std::vector<double> thresholds_;
  std::vector<double> pf_means_;
  std::uint64_t all_rings_ = 0;
};

void merge(Accumulator& into, const Accumulator& from) {
  into.rings += from.rings;
  into.segments += from.segments;
  into.outage += from.outage;
  into.capacity += from.capacity;
  into.ici += from.ici;
  into.served += from.served;
  for (const auto& [mask, counts] : from.contests) {
    auto [it, fresh] = into.contests.try_emplace(mask, Eigen::VectorXd::Zero(counts.size()));
    it->second += counts;
  }
}

double contest_fairness(const Accumulator& acc, const RingGrid& grid, Scheme scheme, int slot) {
  if (acc.served == 0) return 1.0;
  double total = 0.0;
  for (const auto& [mask, counts] : acc.contests) {
    const double trials = counts.sum();
    int users = 0;
    for (int k = 0; k < grid.size(); ++k) {
      if (mask >> k & 1ULL) users += grid.users[k];
    }
    LocationPmf pmf;
    pmf.scheme = scheme;
    pmf.slot = slot;
    pmf.radii = grid.radii;
    pmf.masses = counts / trials;
    total += trials / static_cast<double>(acc.served) * average_fairness(pmf, grid, users).value;
  }
  return total;
}

}  // namespace

std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t index) { return splitmix64(splitmix64(seed) ^ index); }

const SchemeStatistics& SimulationReport::at(Scheme scheme, int slot) const {
  for (const SchemeStatistics& entry : entries) {
    if (entry.scheme == scheme && entry.slot == slot) return entry;
  }
  throw InvalidArgument("simulation report has no entry for " + to_string(scheme) + " slot " + std::to_string(slot));
}

double SimulationReport::slot_average_capacity(Scheme scheme, int slots) const {
  double total = 0.0;
  for (int w = 1; w <= slots; ++w) total += at(scheme, w).capacity;
  return total / slots;
}

double SimulationReport::slot_average_fairness(Scheme scheme, int slots) const {
  double total = 0.0;
  for (int w = 1; w <= slots; ++w) total += at(scheme, w).fairness;
  return total / slots;
}

SimulationReport run_trials(const NetworkConfig& config, const RingGrid& grid, const std::vector<Scheme>& schemes,
                            const ChannelModel& chi, const ChannelModel& zeta, long n_trials, std::uint64_t seed,
                            const SimulationOptions& options) {
  if (schemes.empty()) throw InvalidArgument("run_trials: empty scheme list");
  if (n_trials < 1) throw InvalidArgument("run_trials: need at least one trial");
  if (options.workers < 1) throw InvalidArgument("run_trials: need at least one worker");
  if (grid.size() < 1 || grid.size() > 64) throw InvalidArgument("run_trials: ring count must be in [1, 64]");
  const bool sweeps = std::find(schemes.begin(), schemes.end(), Scheme::GreedyRoundRobin) != schemes.end();
  if (sweeps && (options.greedy_rr_slots < 1 || options.greedy_rr_slots > grid.size())) {
    throw InvalidArgument("run_trials: greedy round robin slots must be in [1, ring count]");
  }
  for (double q : options.thresholds) {
    if (!(q > 0.0)) throw InvalidArgument("run_trials: thresholds must be positive");
  }
  config.validate();

  std::vector<Entry> entries;
  std::vector<std::pair<std::size_t, std::size_t>> groups;  // [first, last) entries sharing a sweep
  for (Scheme scheme : schemes) {
    const std::size_t first = entries.size();
    if (scheme == Scheme::LocationRoundRobin) {
      for (int w = 1; w <= grid.size(); ++w) entries.push_back({scheme, w});
    } else if (scheme == Scheme::GreedyRoundRobin) {
      for (int w = 1; w <= options.greedy_rr_slots; ++w) entries.push_back({scheme, w});
    } else {
      entries.push_back({scheme, 0});
    }
    groups.emplace_back(first, entries.size());
  }

  SimulationReport report;
  report.trials = n_trials;
  report.seed = seed;
  report.thresholds = options.thresholds;
  report.segments = build_segment_grid(config, options.segments);
  const Simulator sim(config, grid, chi, zeta, report.segments, options.thresholds);

  const long blocks = (n_trials + kBlock - 1) / kBlock;
  std::vector<std::vector<Accumulator>> partial(static_cast<std::size_t>(blocks));
  std::vector<std::vector<double>> ici(entries.size());
  if (options.keep_ici) {
    for (auto& samples : ici) samples.resize(static_cast<std::size_t>(n_trials));
  }

  auto run_block = [&](long block) {
    std::vector<Accumulator> accs(entries.size(), sim.empty());
    std::vector<Cell> cells(static_cast<std::size_t>(config.num_interferers) + 1);
    const long end = std::min(n_trials, (block + 1) * kBlock);
    for (long t = block * kBlock; t < end; ++t) {
      Rng rng(trial_seed(seed, static_cast<std::uint64_t>(t)));
      for (Cell& cell : cells) cell = sim.drop(rng);
      for (const auto& [first, last] : groups) {
        std::vector<std::uint64_t> served(cells.size(), 0);
        for (std::size_t e = first; e < last; ++e) {
          double y = 0.0;
          sim.slot(entries[e], cells, served, rng, accs[e], y);
          if (options.keep_ici) ici[e][static_cast<std::size_t>(t)] = y;
        }
      }
    }
    partial[static_cast<std::size_t>(block)] = std::move(accs);
  };

  const int workers = static_cast<int>(std::min<long>(options.workers, blocks));
  if (workers == 1) {
    for (long b = 0; b < blocks; ++b) run_block(b);
  } else {
    std::atomic<long> next{0};
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> failures(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (long b = next++; b < blocks; b = next++) run_block(b);
        } catch (...) {
          failures[static_cast<std::size_t>(w)] = std::current_exception();
        }
      });
    }
    for (std::thread& thread : pool) thread.join();
    for (const auto& failure : failures) {
      if (failure) std::rethrow_exception(failure);
    }
  }

  for (std::size_t e = 0; e < entries.size(); ++e) {
    Accumulator total = sim.empty();
    for (const auto& block : partial) merge(total, block[e]);
    SchemeStatistics stats;
    stats.scheme = entries[e].scheme;
    stats.slot = entries[e].slot;
    stats.served = total.served;
    const double served = std::max<double>(1.0, static_cast<double>(total.served));
    stats.location_pmf = total.rings / served;
    const double interferers = total.segments.sum();
    stats.interferer_pmf = interferers > 0.0 ? Eigen::VectorXd(total.segments / interferers) : total.segments;
    stats.capacity = total.capacity / served;
    stats.outage = total.outage / served;
    stats.mean_ici = total.ici / static_cast<double>(n_trials);
    stats.fairness = contest_fairness(total, grid, stats.scheme, stats.slot);
    stats.ici = std::move(ici[e]);
    report.entries.push_back(std::move(stats));
  }
  return report;
}

Eigen::VectorXd empirical_cdf(std::vector<double> samples, const Eigen::VectorXd& xs) {
  if (samples.empty()) throw InvalidArgument("empirical_cdf: no samples");
  std::sort(samples.begin(), samples.end());
  Eigen::VectorXd out(xs.size());
  const double n = static_cast<double>(samples.size());
  for (Eigen::Index i = 0; i < xs.size(); ++i) {
    out[i] = static_cast<double>(std::upper_bound(samples.begin(), samples.end(), xs[i]) - samples.begin()) / n;
  }
  return out;
}

double total_variation(const Eigen::VectorXd& p, const Eigen::VectorXd& q) {
  if (p.size() != q.size()) throw InvalidArgument("total_variation: length mismatch");
  return 0.5 * (p - q).cwiseAbs().sum();
}

double ks_distance(std::vector<double> samples, const Eigen::VectorXd& xs, const Eigen::VectorXd& cdf) {
  if (samples.empty()) throw InvalidArgument("ks_distance: no samples");
  if (xs.size() < 1 || xs.size() != cdf.size()) throw InvalidArgument("ks_distance: bad grid");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  auto at = [&](double x) {  // F_n(x)
    return static_cast<double>(std::upper_bound(samples.begin(), samples.end(), x) - samples.begin()) / n;
  };
  auto before = [&](double x) {  // F_n(x-)
    return static_cast<double>(std::lower_bound(samples.begin(), samples.end(), x) - samples.begin()) / n;
  };
  const Eigen::Index last = xs.size() - 1;
  double d = std::max(before(xs[0]), cdf[0]);
  d = std::max(d, std::max(1.0 - at(xs[last]), 1.0 - cdf[last]));
  for (Eigen::Index i = 0; i <= last; ++i) {
    d = std::max({d, std::abs(at(xs[i]) - cdf[i]), std::abs(before(xs[i]) - cdf[i])});
    if (i < last) {
      d = std::max({d, before(xs[i + 1]) - cdf[i], cdf[i + 1] - at(xs[i])});
    }
  }
  return d;
}

}  // namespace icim
