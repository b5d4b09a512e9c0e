#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>

#include "icim/fading.hpp"
#include "icim/geometry.hpp"
#include "icim/interference.hpp"
#include "icim/quadrature.hpp"
#include "icim/scheduling.hpp"

namespace icim {

/// Law of the serving cell's scheduled received power X0, in units of the
/// noise power. Stored as one density per ring over a shared log-spaced grid
/// of a statistic t, with X0 = multiplier_k * t when ring k is served, so that
/// P(X0 <= x) = sum_k int_0^{x / multiplier_k} density_k(t) dt.
class SignalLaw {
 public:
  SignalLaw() = default;
  /// `nodes` must be increasing and of odd length; `density` is rings x nodes.
  SignalLaw(Scheme scheme, int slot, Eigen::VectorXd nodes, Eigen::VectorXd multipliers, Eigen::MatrixXd density);

  Scheme scheme() const { return scheme_; }
  int slot() const { return slot_; }
  int components() const { return static_cast<int>(multipliers_.size()); }

  double cdf(double x) const;
  double mean() const;
  /// Probability carried by each ring; matches the scheduler's location PMF.
  Eigen::VectorXd component_masses() const;

  /// E[exp(-s X0)] for Re(s) >= 0, exact for the piecewise-quadratic density.
  std::complex<double> laplace(std::complex<double> s) const;
  /// 1 - E[exp(-s X0)] for real s >= 0, accurate when s X0 is small.
  double laplace_complement(double s) const;
  /// E[exp(j w X0)].
  std::complex<double> cf(double w) const { return laplace(std::complex<double>(0.0, -w)); }

 private:
  Scheme scheme_ = Scheme::Greedy;
  int slot_ = 0;
  Eigen::VectorXd nodes_;
  Eigen::VectorXd multipliers_;
  Eigen::MatrixXd density_;
  Eigen::VectorXd weights_;     // quadrature weights of the interpolating rule
  Eigen::MatrixXd cumulative_;  // rings x panels+1, integral up to each even node
};

/// Builds the X0 law of a scheduler. Greedy uses the product law over rings, PF
/// the normalised contest, RR and location RR the PMF-weighted channel law at
/// each ring radius, and greedy round robin the survivor-weighted restricted
/// contests of slot `pmf.slot`.
SignalLaw signal_law(const LocationPmf& pmf, const RingGrid& grid, const ChannelModel& model,
                     const NetworkConfig& config);

/// Greedy round robin law for `slot`, reusing a computed sweep.
SignalLaw signal_law(const GreedyRoundRobin& sweep, int slot, const RingGrid& grid, const ChannelModel& model,
                     const NetworkConfig& config);

/// P(q Y - X0 >= 0) for a linear interference-to-signal threshold q > 0, by
/// Gil-Pelaez inversion of E[exp(j w (qY - X0))] = cf_Y(q w) cf_X0(-w).
double outage_probability(double q, const SignalLaw& signal, const InterferenceTransform& interference,
                          double tol = 1e-6);

struct CapacityResult {
  /// bits/s/Hz from the primary rule.
  double value = 0.0;
  /// Same integral with the check rule.
  double check = 0.0;
  int order = 0;
  int check_order = 0;

  double relative_difference() const { return std::abs(value - check) / std::abs(value); }
};

/// E[log2(1 + X0 / (Y + n))] = (1/ln 2) int_0^inf L_Y(t) (1 - L_X0(t)) exp(-n t) / t dt,
/// with `noise` n in the units of X0 and Y (1 when both are normalised by the
/// noise power). The integral is taken over u = log t; the flat stretch between
/// the turn-on of 1 - L_X0 and the turn-off of L_Y exp(-n t) (if any) is
/// integrated adaptively and both tails by Gauss-Laguerre.
double ergodic_capacity(const SignalLaw& signal, const InterferenceTransform& interference, double noise,
                        const QuadratureRule& rule);

/// Capacity with the default order 24, cross-checked at order 32. Throws
/// ConvergenceError when the two differ by more than `max_relative_difference`.
CapacityResult ergodic_capacity(const SignalLaw& signal, const InterferenceTransform& interference,
                                double noise = 1.0, int order = 24, int check_order = 32,
                                double max_relative_difference = 1e-3);

struct FairnessResult {
  double value = 1.0;
  /// Access probability of a single user of each ring, P(r_k) / u_k.
  Eigen::VectorXd per_user;
};

/// F = -sum_k P(r_k) [log P(r_k) - log u_k] / log U, the entropy of the per-user
/// access distribution relative to its maximum. `u_total` is the number of
/// contending users; U = 1 gives F = 1.
FairnessResult average_fairness(const LocationPmf& pmf, const RingGrid& grid, int u_total);

/// Fairness of a greedy round robin slot among the users still contending:
/// sum over surviving ring sets S of P(S) F(contest on S, U_S), U_S the users in S.
double greedy_rr_fairness(const GreedyRoundRobin& sweep, const RingGrid& grid, int slot);

/// Fairness of a location round robin slot among the users of the served ring.
double location_rr_fairness(const RingGrid& grid, int slot);

/// Arithmetic mean of `metric(w)` over slots w = 1..slots.
double slot_average(const std::function<double(int)>& metric, int slots);

}  // namespace icim
