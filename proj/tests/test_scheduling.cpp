#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "icim/error.hpp"
#include "icim/scheduling.hpp"

using namespace icim;

namespace {

NetworkConfig unit_config(double beta) {
  NetworkConfig config;
  config.p_max = 1.0;
  config.c_pl = 1.0;
  config.sigma2 = 1.0;
  config.beta = beta;
  return config;
}

RingGrid manual_grid(std::vector<double> radii, std::vector<int> users) {
  RingGrid grid;
  grid.inner_radius = radii.front() * 0.5;
  grid.radii = Eigen::Map<Eigen::VectorXd>(radii.data(), static_cast<Eigen::Index>(radii.size()));
  grid.users = Eigen::Map<Eigen::VectorXi>(users.data(), static_cast<Eigen::Index>(users.size()));
  grid.widths = Eigen::VectorXd::Zero(grid.size());
  for (int k = 0; k < grid.size(); ++k) grid.widths[k] = grid.radii[k] - grid.inner_edge(k);
  return grid;
}

// Brute force: every user sits at its ring's radius; `scale[k]` divides the
// draw for ring k; rings in `excluded` never win. Returns win frequencies.
Eigen::VectorXd simulate_contest(const RingGrid& grid, const ChannelModel& model, const Eigen::VectorXd& scale,
                                 int trials, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Eigen::VectorXd wins = Eigen::VectorXd::Zero(grid.size());
  for (int t = 0; t < trials; ++t) {
    int best_ring = -1;
    double best = -1.0;
    for (int k = 0; k < grid.size(); ++k) {
      for (int u = 0; u < grid.users[k]; ++u) {
        const double value = sample(model, rng) / scale[k];
        if (value > best) {
          best = value;
          best_ring = k;
        }
      }
    }
    wins[best_ring] += 1.0;
  }
  return wins / trials;
}

double total_variation(const Eigen::VectorXd& a, const Eigen::VectorXd& b) { return 0.5 * (a - b).cwiseAbs().sum(); }

const ChannelModel kZeta = make_gamma(1.5, 2.0 / 3.0);

}  // namespace

TEST_CASE("scheme names round-trip") {
  for (Scheme scheme : {Scheme::Greedy, Scheme::ProportionalFair, Scheme::RoundRobin, Scheme::LocationRoundRobin,
                        Scheme::GreedyRoundRobin}) {
    CHECK(scheme_from_string(to_string(scheme)) == scheme);
  }
  CHECK_THROWS_AS(scheme_from_string("fastest"), InvalidArgument);
}

TEST_CASE("ring maximum law") {
  const RingGrid grid = manual_grid({1.0, 2.0}, {1, 2});
  const NetworkConfig config = unit_config(2.0);
  const ChannelModel exp1 = make_exponential(1.0);

  const RingSnrLaw single = ring_max_snr_law(grid, 0, exp1, config);
  CHECK(single.cdf(0.7) == doctest::Approx(1.0 - std::exp(-0.7)).epsilon(1e-14));
  CHECK(single.mean_snr == doctest::Approx(1.0));

  const RingSnrLaw pair = ring_max_snr_law(grid, 1, exp1, config);
  for (double gamma : {0.01, 0.1, 0.3, 1.0}) {
    const double expected = std::pow(1.0 - std::exp(-gamma * 4.0), 2.0);
    CHECK(pair.cdf(gamma) == doctest::Approx(expected).epsilon(1e-12));
    const double density = 2.0 * (1.0 - std::exp(-4.0 * gamma)) * 4.0 * std::exp(-4.0 * gamma);
    CHECK(pair.pdf(gamma) == doctest::Approx(density).epsilon(1e-12));
  }
  // E[max of 2 Exp(1)] = 3/2, scaled by the ring gain 1/4.
  CHECK(pair.mean_snr == doctest::Approx(0.375).epsilon(1e-9));
  CHECK(pair.cdf(0.0) == 0.0);
  CHECK_THROWS_AS(ring_max_snr_law(grid, 2, exp1, config), InvalidArgument);
}

TEST_CASE("ring maximum median grows with users") {
  // E[max of u Exp(1)] is the harmonic number H_u.
  const ChannelModel exp1 = make_exponential(1.0);
  CHECK(expected_maximum(exp1, 4) == doctest::Approx(1.0 + 0.5 + 1.0 / 3.0 + 0.25).epsilon(1e-9));
  const NetworkConfig config = unit_config(2.0);
  double previous_median = 0.0;
  for (int u : {1, 2, 4}) {
    const RingGrid grid = manual_grid({1.0}, {u});
    const RingSnrLaw law = ring_max_snr_law(grid, 0, kZeta, config);
    double lo = 0.0;
    double hi = 50.0;
    for (int i = 0; i < 100; ++i) {
      const double mid = 0.5 * (lo + hi);
      (law.cdf(mid) < 0.5 ? lo : hi) = mid;
    }
    CHECK(lo > previous_median);
    previous_median = lo;
  }
}

TEST_CASE("greedy on symmetric and two-ring grids") {
  const RingGrid equal = manual_grid({1.0, 1.0}, {3, 3});
  const LocationPmf symmetric = greedy_pmf(equal, kZeta, unit_config(2.0));
  CHECK(symmetric.masses[0] == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(symmetric.masses[1] == doctest::Approx(0.5).epsilon(1e-9));

  // One Exp(1) user at distance 1 against one at distance 2 with beta = 2:
  // the outer user wins iff zeta_2 > 4 zeta_1, probability 1/5.
  const RingGrid grid = manual_grid({1.0, 2.0}, {1, 1});
  const ChannelModel exp1 = make_exponential(1.0);
  const LocationPmf pmf = greedy_pmf(grid, exp1, unit_config(2.0));
  CHECK(pmf.masses[0] == doctest::Approx(0.8).epsilon(1e-9));
  Eigen::VectorXd scale(2);
  scale << 1.0, 4.0;
  const Eigen::VectorXd empirical = simulate_contest(grid, exp1, scale, 1000000, 11);
  CHECK(std::abs(empirical[0] - pmf.masses[0]) < 0.005);
}

TEST_CASE("greedy on the default grid") {
  const NetworkConfig config;
  const RingGrid grid = build_ring_grid(config, 2.0);
  const LocationPmf greedy = greedy_pmf(grid, kZeta, config);
  const LocationPmf rr = round_robin_pmf(grid);
  CHECK(greedy.masses.sum() == doctest::Approx(1.0).epsilon(1e-8));
  CHECK((greedy.masses.array() >= 0.0).all());
  // Mass sits further in than under round robin.
  CHECK(greedy.mean_radius() < rr.mean_radius());
  Eigen::Index peak = 0;
  greedy.masses.maxCoeff(&peak);
  CHECK(peak < grid.size() - 1);

  // Brute-force oracle with users at the ring radii.
  Eigen::VectorXd scale(grid.size());
  for (int k = 0; k < grid.size(); ++k) scale[k] = std::pow(grid.radii[k] / 500.0, config.beta);
  const Eigen::VectorXd empirical = simulate_contest(grid, kZeta, scale, 200000, 5);
  CHECK(total_variation(empirical, greedy.masses) < 0.01);
}

TEST_CASE("greedy mass moves inward with more users") {
  double previous = 1e9;
  for (int users : {10, 50, 100}) {
    NetworkConfig config;
    config.num_users = users;
    const RingGrid grid = build_ring_grid(config, 2.0);
    const double mean_radius = greedy_pmf(grid, kZeta, config).mean_radius();
    CHECK(mean_radius <= previous);
    previous = mean_radius;
  }
}

TEST_CASE("proportional fair") {
  const RingGrid equal = manual_grid({1.0, 2.0, 3.0, 4.0}, {3, 3, 3, 3});
  const LocationPmf uniform = proportional_fair_pmf(equal, kZeta, unit_config(2.6));
  for (int k = 0; k < 4; ++k) CHECK(uniform.masses[k] == doctest::Approx(0.25).epsilon(1e-9));

  const RingGrid grid = manual_grid({1.0, 2.0}, {1, 3});
  const LocationPmf pmf = proportional_fair_pmf(grid, kZeta, unit_config(2.0));
  CHECK(pmf.masses[1] > pmf.masses[0]);
  Eigen::VectorXd scale(2);
  scale << expected_maximum(kZeta, 1), expected_maximum(kZeta, 3);
  const Eigen::VectorXd empirical = simulate_contest(grid, kZeta, scale, 1000000, 23);
  CHECK(std::abs(empirical[1] - pmf.masses[1]) < 0.005);

  const NetworkConfig config;
  const RingGrid full = build_ring_grid(config, 2.0);
  const LocationPmf pf = proportional_fair_pmf(full, kZeta, config);
  const LocationPmf greedy = greedy_pmf(full, kZeta, config);
  CHECK(pf.masses.sum() == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(pf.masses.maxCoeff() < greedy.masses.maxCoeff());
}

TEST_CASE("round robin") {
  const RingGrid one = manual_grid({1.0}, {4});
  CHECK(round_robin_pmf(one).masses[0] == 1.0);
  const RingGrid two = manual_grid({1.0, 2.0}, {15, 35});
  const LocationPmf pmf = round_robin_pmf(two);
  CHECK(pmf.masses[0] == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(pmf.masses[1] == doctest::Approx(0.7).epsilon(1e-15));

  const RingGrid grid = build_ring_grid(NetworkConfig{}, 2.0);
  const LocationPmf full = round_robin_pmf(grid);
  Eigen::Index peak = 0;
  full.masses.maxCoeff(&peak);
  CHECK(peak == grid.size() - 1);
  CHECK(full.masses.sum() == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("location round robin") {
  const RingGrid grid = build_ring_grid(NetworkConfig{}, 2.0);
  CHECK(location_rr_pmf(grid, 1).masses[0] == 1.0);
  CHECK(location_rr_pmf(grid, grid.size()).masses[grid.size() - 1] == 1.0);
  Eigen::VectorXd average = Eigen::VectorXd::Zero(grid.size());
  for (int w = 1; w <= grid.size(); ++w) average += location_rr_pmf(grid, w).masses / grid.size();
  for (int k = 0; k < grid.size(); ++k) CHECK(average[k] == doctest::Approx(1.0 / grid.size()));
  CHECK_THROWS_AS(location_rr_pmf(grid, 0), InvalidArgument);
  CHECK_THROWS_AS(location_rr_pmf(grid, grid.size() + 1), InvalidArgument);
}

TEST_CASE("greedy round robin basics") {
  const NetworkConfig config;
  const RingGrid grid = build_ring_grid(config, 2.0);
  const LocationPmf first = greedy_rr_pmf(grid, kZeta, config, 1);
  const LocationPmf greedy = greedy_pmf(grid, kZeta, config);
  for (int k = 0; k < grid.size(); ++k) CHECK(first.masses[k] == greedy.masses[k]);

  const GreedyRoundRobin sweep(grid, kZeta, config, 6);
  for (int w = 1; w <= 6; ++w) {
    const LocationPmf pmf = sweep.pmf(w);
    CHECK(pmf.slot == w);
    CHECK(pmf.masses.sum() == doctest::Approx(1.0).epsilon(1e-8));
    double survivors = 0.0;
    for (const auto& entry : sweep.survivors(w)) survivors += entry.second;
    CHECK(survivors == doctest::Approx(1.0).epsilon(1e-8));
  }
  CHECK(GreedyRoundRobin::integral_count(10, 6) == 3820);
  CHECK(GreedyRoundRobin::integral_count(10, 1) == 10);
  CHECK_THROWS_AS(GreedyRoundRobin(grid, kZeta, config, 6, 1000), BudgetExceeded);
  CHECK_THROWS_AS(greedy_rr_pmf(grid, kZeta, config, 0), InvalidArgument);
  CHECK_THROWS_AS(greedy_rr_pmf(grid, kZeta, config, grid.size() + 1), InvalidArgument);
}

TEST_CASE("greedy round robin on two rings") {
  const RingGrid grid = manual_grid({1.0, 2.0}, {2, 3});
  const NetworkConfig config = unit_config(2.0);
  const GreedyRoundRobin sweep(grid, kZeta, config, 2);
  const LocationPmf first = sweep.pmf(1);
  const LocationPmf second = sweep.pmf(2);
  CHECK(second.masses[0] == doctest::Approx(first.masses[1]).epsilon(1e-12));
  CHECK(second.masses[1] == doctest::Approx(first.masses[0]).epsilon(1e-12));
  // Over the sweep each ring is served exactly once.
  CHECK(first.masses[0] + second.masses[0] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("greedy round robin second slot matches simulation") {
  const RingGrid grid = manual_grid({1.0, 1.5, 2.0}, {2, 2, 3});
  const NetworkConfig config = unit_config(2.0);
  const ChannelModel exp1 = make_exponential(1.0);
  const LocationPmf analytic = greedy_rr_pmf(grid, exp1, config, 2);

  std::mt19937_64 rng(99);
  const int trials = 1000000;
  Eigen::VectorXd counts = Eigen::VectorXd::Zero(3);
  for (int t = 0; t < trials; ++t) {
    int served = -1;
    for (int slot = 0; slot < 2; ++slot) {
      int best_ring = -1;
      double best = -1.0;
      for (int k = 0; k < 3; ++k) {
        for (int u = 0; u < grid.users[k]; ++u) {
          const double value = sample(exp1, rng) / (grid.radii[k] * grid.radii[k]);
          if (k != served && value > best) {
            best = value;
            best_ring = k;
          }
        }
      }
      if (slot == 0) served = best_ring;
      else counts[best_ring] += 1.0;
    }
  }
  counts /= trials;
  for (int k = 0; k < 3; ++k) CHECK(std::abs(counts[k] - analytic.masses[k]) < 0.005);
}

TEST_CASE("joint pmf with angle") {
  const RingGrid grid = build_ring_grid(NetworkConfig{}, 2.0);
  const LocationPmf pmf = round_robin_pmf(grid);
  const AngularGrid angular = build_angular_grid(180);
  const JointLocationPmf joint = joint_pmf_with_angle(pmf, angular);
  CHECK(joint.masses.sum() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(joint.masses(3, 17) == doctest::Approx(pmf.masses[3] / 180.0).epsilon(1e-15));
  const Eigen::VectorXd marginal = joint.masses.rowwise().sum();
  CHECK((marginal - pmf.masses).cwiseAbs().maxCoeff() < 1e-15);
}
