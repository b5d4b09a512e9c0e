#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "icim/fading.hpp"
#include "icim/geometry.hpp"

namespace icim {

enum class Scheme { Greedy, ProportionalFair, RoundRobin, LocationRoundRobin, GreedyRoundRobin };

std::string to_string(Scheme scheme);
/// Accepts "greedy", "pf", "rr", "lrr", "grr" and the long names.
Scheme scheme_from_string(const std::string& name);
bool is_slot_based(Scheme scheme);

/// P(selected user lies in ring k), aligned with RingGrid::radii. `slot` is the
/// 1-based slot for slot-based schemes and 0 otherwise.
struct LocationPmf {
  Scheme scheme = Scheme::Greedy;
  int slot = 0;
  Eigen::VectorXd radii;
  Eigen::VectorXd masses;

  int size() const { return static_cast<int>(masses.size()); }
  double mean_radius() const { return radii.dot(masses); }
};

/// Law of the strongest SNR among the u_k users of ring k, with users placed
/// at the ring's outer radius: gamma = gain * zeta, gain = K_bar r_k^-beta.
struct RingSnrLaw {
  int ring = 0;
  int users = 1;
  double gain = 1.0;
  /// Short-term mean of the selected SNR, gain * E[max of u_k zeta].
  double mean_snr = 1.0;
  ChannelModel model;

  double cdf(double gamma) const;
  double log_cdf(double gamma) const;
  double pdf(double gamma) const;
};

/// `k` is the 0-based ring index.
RingSnrLaw ring_max_snr_law(const RingGrid& grid, int k, const ChannelModel& model,
                            const NetworkConfig& config);

/// E[max of u i.i.d. draws of the model].
double expected_maximum(const ChannelModel& model, int u);

/// Per-ring divisors of the contest statistic: ring k competes with the
/// maximum of its u_k channel draws divided by scale_k. Greedy (and greedy
/// round robin) use (r_k / R)^beta, proportional fair E[max of u_k zeta].
Eigen::VectorXd contest_scales(Scheme scheme, const RingGrid& grid, const ChannelModel& model,
                               const NetworkConfig& config);

LocationPmf greedy_pmf(const RingGrid& grid, const ChannelModel& model, const NetworkConfig& config);
LocationPmf proportional_fair_pmf(const RingGrid& grid, const ChannelModel& model,
                                  const NetworkConfig& config);
LocationPmf round_robin_pmf(const RingGrid& grid);
/// `slot` is 1-based; slot 1 serves the innermost ring.
LocationPmf location_rr_pmf(const RingGrid& grid, int slot);

/// Probability that ring k wins a greedy contest restricted to the rings in
/// `mask` (bit i set means ring i takes part). Ratios are path-loss ratios, so
/// the result does not depend on K_bar.
double restricted_greedy_mass(const RingGrid& grid, const ChannelModel& model, double beta,
                              std::uint64_t mask, int k);

/// Exact greedy round robin over a sweep of `max_slot` slots. At each slot the
/// rings already served in the sweep are excluded. Conditional contests depend
/// only on the surviving ring set, so they are memoised per (set, ring).
class GreedyRoundRobin {
 public:
  /// Throws BudgetExceeded when the number of distinct conditional integrals
  /// exceeds `budget`.
  GreedyRoundRobin(const RingGrid& grid, const ChannelModel& model, const NetworkConfig& config,
                   int max_slot, long budget = 100000);

  int max_slot() const { return max_slot_; }

  /// Distribution of the surviving ring set at the start of `slot` (1-based).
  const std::map<std::uint64_t, double>& survivors(int slot) const;

  /// Conditional win probabilities for a surviving set, indexed by ring.
  const Eigen::VectorXd& contest(std::uint64_t mask) const;

  LocationPmf pmf(int slot) const;

  /// Number of distinct conditional integrals a sweep of `max_slot` needs.
  static long integral_count(int rings, int max_slot);

 private:
  RingGrid grid_;
  int max_slot_;
  std::vector<std::map<std::uint64_t, double>> survivors_;
  std::map<std::uint64_t, Eigen::VectorXd> contests_;
};

LocationPmf greedy_rr_pmf(const RingGrid& grid, const ChannelModel& model, const NetworkConfig& config,
                          int slot, long budget = 100000);

/// P(r_k, theta_i) = P(r_k) / I.
struct JointLocationPmf {
  Scheme scheme = Scheme::Greedy;
  int slot = 0;
  Eigen::VectorXd radii;
  Eigen::VectorXd angles;
  Eigen::MatrixXd masses;  // rings x angles
};

JointLocationPmf joint_pmf_with_angle(const LocationPmf& pmf, const AngularGrid& angular);

}  // namespace icim
