#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "icim/fading.hpp"
#include "icim/geometry.hpp"
#include "icim/scheduling.hpp"

namespace icim {

/// Everything measured for one scheme in one slot. Received powers are in
/// units of the noise power.
struct SchemeStatistics {
  Scheme scheme = Scheme::Greedy;
  /// 1-based slot for slot-based schemes, 0 otherwise.
  int slot = 0;
  /// Ring of the serving cell's scheduled user, over trials where it schedules someone.
  Eigen::VectorXd location_pmf;
  /// Distance from each interfering cell's scheduled user to the reference
  /// base station, binned on the report's segment grid.
  Eigen::VectorXd interferer_pmf;
  /// Cumulative interference Y of every trial, in trial order.
  std::vector<double> ici;
  /// Mean of log2(1 + X0 / (Y + 1)) over trials where the serving cell schedules.
  double capacity = 0.0;
  /// Fraction of scheduling trials with q Y - X0 >= 0, per threshold.
  Eigen::VectorXd outage;
  /// Fairness of the empirical access pattern, averaged over contender sets.
  double fairness = 1.0;
  double mean_ici = 0.0;
  /// Trials in which the serving cell had an eligible user.
  long served = 0;
};

struct SimulationOptions {
  int workers = 1;
  /// Number of distance segments M of the reported interferer PMF.
  int segments = 20;
  /// Linear interference-to-signal thresholds q for the outage rates.
  std::vector<double> thresholds;
  /// Slots simulated per greedy round robin sweep.
  int greedy_rr_slots = 6;
  bool keep_ici = true;
};

struct SimulationReport {
  long trials = 0;
  std::uint64_t seed = 0;
  std::vector<double> thresholds;
  SegmentGrid segments;
  /// One entry per non-slot scheme; one per slot for location RR (every ring)
  /// and greedy RR (`greedy_rr_slots`).
  std::vector<SchemeStatistics> entries;

  /// Throws InvalidArgument when the scheme or slot was not simulated.
  const SchemeStatistics& at(Scheme scheme, int slot = 0) const;
  /// Mean capacity over slots 1..slots of a slot-based scheme.
  double slot_average_capacity(Scheme scheme, int slots) const;
  double slot_average_fairness(Scheme scheme, int slots) const;
};

/// User-level simulation of the reference cell and `config.num_interferers`
/// interfering cells at distance `config.bs_distance`. Every trial drops
/// `config.num_users` users uniformly on each disc (shared by all schemes),
/// schedules one user per cell and slot, and accumulates the report. The
/// serving link uses `zeta`, interfering links `chi`. Users inside the grid's
/// inner disc are never scheduled; a cell without an eligible user stays idle.
///
/// Trial t draws from its own generator seeded from (seed, t), and partial
/// sums are reduced in trial-block order, so the report is bit-identical for
/// any worker count.
SimulationReport run_trials(const NetworkConfig& config, const RingGrid& grid, const std::vector<Scheme>& schemes,
                            const ChannelModel& chi, const ChannelModel& zeta, long n_trials, std::uint64_t seed,
                            const SimulationOptions& options = {});

/// Right-continuous empirical CDF of `samples` at each x.
Eigen::VectorXd empirical_cdf(std::vector<double> samples, const Eigen::VectorXd& xs);

/// Half the L1 distance between two PMFs of equal length.
double total_variation(const Eigen::VectorXd& p, const Eigen::VectorXd& q);

/// Upper bound on sup_x |F_n(x) - F(x)| for the empirical CDF F_n of `samples`
/// and a continuous CDF known at increasing points `xs` (`cdf` = F(xs)) that
/// cover the samples. Between grid points F is only known to be monotone, so
/// the bound exceeds the exact distance by at most the largest step of F.
double ks_distance(std::vector<double> samples, const Eigen::VectorXd& xs, const Eigen::VectorXd& cdf);

/// Seed of trial `index` derived from the master seed by two splitmix64 rounds.
std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t index);

}  // namespace icim
