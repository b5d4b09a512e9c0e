#include "icim/scheduling.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "icim/error.hpp"
#include "icim/quadrature.hpp"

namespace icim {

namespace {

// P(ring k has the largest statistic) for every ring k in `mask`, when ring i's
// statistic is the maximum of u_i draws of zeta / scale_i and only the rings in
// `mask` compete. All rings share the integration variable t (the statistic),
// so one pass yields the whole vector:
//   P_k = int u_k s_k f(t s_k) F(t s_k)^(u_k - 1) prod_{i != k} F(t s_i)^u_i dt.
Eigen::VectorXd contest_masses(const ChannelModel& model, const Eigen::VectorXd& scale,
                               const Eigen::VectorXi& users, std::uint64_t mask) {
  const int rings = static_cast<int>(users.size());
  Eigen::VectorXd masses = Eigen::VectorXd::Zero(rings);
  std::vector<int> members;
  for (int i = 0; i < rings; ++i) {
    if (mask >> i & 1U) members.push_back(i);
  }
  if (members.size() == 1) {
    masses[members.front()] = 1.0;
    return masses;
  }
  const int m = static_cast<int>(members.size());
  double smallest = scale[members.front()];
  double largest = smallest;
  for (int i : members) {
    smallest = std::min(smallest, scale[i]);
    largest = std::max(largest, scale[i]);
  }
  const auto [lo, hi] = support_range(model);

  Eigen::ArrayXd log_cdfs(m);
  auto integrand = [&](double t) {
    Eigen::ArrayXd values = Eigen::ArrayXd::Zero(m);
    double total = 0.0;
    for (int j = 0; j < m; ++j) {
      log_cdfs[j] = log_cdf(model, t * scale[members[j]]);
      total += users[members[j]] * log_cdfs[j];
    }
    for (int j = 0; j < m; ++j) {
      const int k = members[j];
      // Log of prod over the other rings times F(t s_k)^(u_k - 1).
      double rest = 0.0;
      if (std::isfinite(log_cdfs[j])) {
        rest = total - log_cdfs[j];
      } else {
        for (int i = 0; i < m; ++i) {
          if (i != j) rest += users[members[i]] * log_cdfs[i];
        }
        if (users[k] > 1) rest = -std::numeric_limits<double>::infinity();
      }
      if (rest < -745.0) continue;
      values[j] = users[k] * scale[k] * pdf(model, t * scale[k]) * std::exp(rest);
    }
    return values;
  };
  const Eigen::ArrayXd integral = integrate_octaves(integrand, lo / largest, hi / smallest, 1e-10, 1e-13);
  for (int j = 0; j < m; ++j) masses[members[j]] = integral[j];
  return masses;
}

// Path-loss scale r_i^beta (up to a common factor) so greedy compares zeta / scale_i.
Eigen::VectorXd path_loss_scale(const RingGrid& grid, double beta) {
  const double outer = grid.radii[grid.size() - 1];
  Eigen::VectorXd scale(grid.size());
  for (int i = 0; i < grid.size(); ++i) scale[i] = std::pow(grid.radii[i] / outer, beta);
  return scale;
}

std::uint64_t full_mask(int rings) {
  if (rings > 63) throw InvalidArgument("at most 63 rings are supported");
  return (std::uint64_t{1} << rings) - 1;
}

LocationPmf make_pmf(Scheme scheme, const RingGrid& grid) {
  LocationPmf pmf;
  pmf.scheme = scheme;
  pmf.radii = grid.radii;
  pmf.masses = Eigen::VectorXd::Zero(grid.size());
  return pmf;
}

}  // namespace

std::string to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::Greedy: return "greedy";
    case Scheme::ProportionalFair: return "pf";
    case Scheme::RoundRobin: return "rr";
    case Scheme::LocationRoundRobin: return "lrr";
    case Scheme::GreedyRoundRobin: return "grr";
  }
  return "unknown";
}

Scheme scheme_from_string(const std::string& name) {
  if (name == "greedy") return Scheme::Greedy;
  if (name == "pf" || name == "proportional_fair") return Scheme::ProportionalFair;
  if (name == "rr" || name == "round_robin") return Scheme::RoundRobin;
  if (name == "lrr" || name == "location_round_robin") return Scheme::LocationRoundRobin;
  if (name == "grr" || name == "greedy_round_robin") return Scheme::GreedyRoundRobin;
  throw InvalidArgument("unknown scheme '" + name + "'");
}

bool is_slot_based(Scheme scheme) {
  return scheme == Scheme::LocationRoundRobin || scheme == Scheme::GreedyRoundRobin;
}

double RingSnrLaw::cdf(double gamma) const { return std::exp(log_cdf(gamma)); }

double RingSnrLaw::log_cdf(double gamma) const { return users * icim::log_cdf(model, gamma / gain); }

double RingSnrLaw::pdf(double gamma) const {
  const double y = gamma / gain;
  const double rest = users > 1 ? (users - 1) * icim::log_cdf(model, y) : 0.0;
  return users * icim::pdf(model, y) / gain * std::exp(rest);
}

double expected_maximum(const ChannelModel& model, int u) {
  if (u < 1) throw InvalidArgument("expected_maximum: u must be at least 1");
  if (u == 1) return mean(model);
  const auto [lo, hi] = support_range(model);
  auto tail = [&](double y) { return -std::expm1(u * log_cdf(model, y)); };
  return lo + integrate_octaves(tail, lo, hi, 1e-11, 1e-14 * mean(model));
}

RingSnrLaw ring_max_snr_law(const RingGrid& grid, int k, const ChannelModel& model,
                            const NetworkConfig& config) {
  if (k < 0 || k >= grid.size()) throw InvalidArgument("ring index out of range");
  RingSnrLaw law;
  law.ring = k;
  law.users = grid.users[k];
  law.gain = config.k_bar() * std::pow(grid.radii[k], -config.beta);
  law.mean_snr = law.gain * expected_maximum(model, law.users);
  law.model = model;
  return law;
}

double restricted_greedy_mass(const RingGrid& grid, const ChannelModel& model, double beta,
                              std::uint64_t mask, int k) {
  if (k < 0 || k >= grid.size() || !(mask >> k & 1U)) {
    throw InvalidArgument("restricted_greedy_mass: ring not in the set");
  }
  return contest_masses(model, path_loss_scale(grid, beta), grid.users, mask)[k];
}

Eigen::VectorXd contest_scales(Scheme scheme, const RingGrid& grid, const ChannelModel& model,
                               const NetworkConfig& config) {
  switch (scheme) {
    case Scheme::Greedy:
    case Scheme::GreedyRoundRobin: return path_loss_scale(grid, config.beta);
    case Scheme::ProportionalFair: {
      // xi_k = gamma_k / mean_k exceeds x iff the ring maximum of zeta exceeds
      // x E[max of u_k zeta]; path loss cancels.
      Eigen::VectorXd scale(grid.size());
      for (int k = 0; k < grid.size(); ++k) scale[k] = expected_maximum(model, grid.users[k]);
      return scale;
    }
    default: throw InvalidArgument("contest_scales: " + to_string(scheme) + " is not a contest");
  }
}

LocationPmf greedy_pmf(const RingGrid& grid, const ChannelModel& model, const NetworkConfig& config) {
  LocationPmf pmf = make_pmf(Scheme::Greedy, grid);
  const Eigen::VectorXd scale = contest_scales(Scheme::Greedy, grid, model, config);
  pmf.masses = contest_masses(model, scale, grid.users, full_mask(grid.size()));
  return pmf;
}

LocationPmf proportional_fair_pmf(const RingGrid& grid, const ChannelModel& model,
                                  const NetworkConfig& config) {
  LocationPmf pmf = make_pmf(Scheme::ProportionalFair, grid);
  const Eigen::VectorXd scale = contest_scales(Scheme::ProportionalFair, grid, model, config);
  pmf.masses = contest_masses(model, scale, grid.users, full_mask(grid.size()));
  return pmf;
}

LocationPmf round_robin_pmf(const RingGrid& grid) {
  LocationPmf pmf = make_pmf(Scheme::RoundRobin, grid);
  pmf.masses = grid.users.cast<double>() / static_cast<double>(grid.total_users());
  return pmf;
}

LocationPmf location_rr_pmf(const RingGrid& grid, int slot) {
  if (slot < 1 || slot > grid.size()) throw InvalidArgument("location_rr_pmf: slot out of range");
  LocationPmf pmf = make_pmf(Scheme::LocationRoundRobin, grid);
  pmf.slot = slot;
  pmf.masses[slot - 1] = 1.0;
  return pmf;
}

long GreedyRoundRobin::integral_count(int rings, int max_slot) {
  long total = 0;
  long subsets = 1;  // C(rings, w - 1)
  for (int w = 1; w <= max_slot; ++w) {
    total += subsets * (rings - w + 1);
    subsets = subsets * (rings - w + 1) / w;
  }
  return total;
}

GreedyRoundRobin::GreedyRoundRobin(const RingGrid& grid, const ChannelModel& model,
                                   const NetworkConfig& config, int max_slot, long budget)
    : grid_(grid), max_slot_(max_slot) {
  if (max_slot < 1 || max_slot > grid.size()) throw InvalidArgument("greedy round robin: slot count out of range");
  const long needed = integral_count(grid.size(), max_slot);
  if (needed > budget) {
    std::ostringstream os;
    os << "greedy round robin: " << needed << " conditional integrals exceed the budget of " << budget;
    throw BudgetExceeded(os.str());
  }
  const Eigen::VectorXd scale = path_loss_scale(grid, config.beta);
  survivors_.resize(max_slot);
  survivors_[0][full_mask(grid.size())] = 1.0;
  for (int w = 0; w < max_slot; ++w) {
    for (const auto& [mask, probability] : survivors_[w]) {
      Eigen::VectorXd wins = contest_masses(model, scale, grid.users, mask);
      if (w + 1 < max_slot) {
        for (int k = 0; k < grid.size(); ++k) {
          if (wins[k] > 0.0) survivors_[w + 1][mask & ~(std::uint64_t{1} << k)] += probability * wins[k];
        }
      }
      contests_.emplace(mask, std::move(wins));
    }
  }
}

const std::map<std::uint64_t, double>& GreedyRoundRobin::survivors(int slot) const {
  if (slot < 1 || slot > max_slot_) throw InvalidArgument("greedy round robin: slot out of range");
  return survivors_[slot - 1];
}

const Eigen::VectorXd& GreedyRoundRobin::contest(std::uint64_t mask) const {
  const auto it = contests_.find(mask);
  if (it == contests_.end()) throw InvalidArgument("greedy round robin: unreachable ring set");
  return it->second;
}

LocationPmf GreedyRoundRobin::pmf(int slot) const {
  LocationPmf pmf = make_pmf(Scheme::GreedyRoundRobin, grid_);
  pmf.slot = slot;
  for (const auto& [mask, probability] : survivors(slot)) pmf.masses += probability * contest(mask);
  return pmf;
}

LocationPmf greedy_rr_pmf(const RingGrid& grid, const ChannelModel& model, const NetworkConfig& config,
                          int slot, long budget) {
  return GreedyRoundRobin(grid, model, config, slot, budget).pmf(slot);
}

JointLocationPmf joint_pmf_with_angle(const LocationPmf& pmf, const AngularGrid& angular) {
  JointLocationPmf joint;
  joint.scheme = pmf.scheme;
  joint.slot = pmf.slot;
  joint.radii = pmf.radii;
  joint.angles = angular.angles;
  joint.masses = pmf.masses * Eigen::RowVectorXd::Constant(angular.size(), angular.mass());
  return joint;
}

}  // namespace icim
