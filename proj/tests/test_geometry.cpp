#include <doctest.h>

#include <cmath>
#include <numbers>

#include "icim/error.hpp"
#include "icim/geometry.hpp"

using namespace icim;

TEST_CASE("default ring grid") {
  const NetworkConfig config;
  const RingGrid grid = build_ring_grid(config, 2.0);
  REQUIRE(grid.size() == 10);

  const int expected[] = {1, 1, 1, 2, 3, 4, 5, 7, 10, 15};
  for (int k = 0; k < 10; ++k) CHECK(grid.users[k] == expected[k]);
  CHECK(grid.total_users() == 49);
  CHECK(std::abs(grid.total_users() - 50) <= grid.size() / 2.0);
  CHECK(grid.radii[9] == doctest::Approx(500.0).epsilon(1e-15));
  CHECK(grid.radii[8] == doctest::Approx(500.0 * std::pow(10.0, -2.0 / 26.0)).epsilon(1e-12));
  CHECK(grid.radii[8] == doctest::Approx(418.84).epsilon(1e-4));
}

TEST_CASE("ring grid invariants") {
  for (double beta : {2.2, 2.6, 3.0, 4.0}) {
    for (double kappa : {0.5, 1.0, 2.0, 3.0}) {
      for (int users : {1, 10, 50, 100}) {
        NetworkConfig config;
        config.beta = beta;
        config.num_users = users;
        RingGrid grid;
        try {
          grid = build_ring_grid(config, kappa);
        } catch (const InvalidArgument&) {
          continue;  // outermost ring rounds to zero
        }
        const int rings = grid.size();
        const double step = std::pow(10.0, kappa / (10.0 * beta));
        CHECK(grid.radii[rings - 1] == config.radius);
        for (int k = 0; k < rings; ++k) {
          CHECK(grid.users[k] >= 1);
          const double inner = grid.inner_edge(k);
          CHECK(grid.radii[k] / inner == doctest::Approx(step).epsilon(1e-9));
          if (k > 0) CHECK(grid.widths[k] >= grid.widths[k - 1]);
        }
        // Rounding moves each ring by at most half a user; the unscheduled
        // inner disc keeps its expected share on top of that.
        const double disc = users * std::pow(grid.inner_radius / config.radius, 2.0);
        CHECK(std::abs(grid.total_users() + disc - users) <= rings / 2.0 + 1e-9);
      }
    }
  }
}

TEST_CASE("single ring when the decay step is large") {
  const RingGrid grid = build_ring_grid(NetworkConfig{}, 100.0);
  REQUIRE(grid.size() == 1);
  CHECK(grid.radii[0] == 500.0);
  CHECK(grid.users[0] == 50);
}

TEST_CASE("ring grid rejects bad input") {
  CHECK_THROWS_AS(build_ring_grid(NetworkConfig{}, 0.0), InvalidArgument);
  CHECK_THROWS_AS(build_ring_grid(NetworkConfig{}, -1.0), InvalidArgument);
  NetworkConfig lonely;
  lonely.num_users = 1;
  CHECK_THROWS_AS(build_ring_grid(lonely, 1.0), InvalidArgument);
  NetworkConfig close;
  close.bs_distance = 400.0;
  CHECK_THROWS_AS(build_ring_grid(close, 2.0), InvalidArgument);
}

TEST_CASE("ring membership") {
  const RingGrid grid = build_ring_grid(NetworkConfig{}, 2.0);
  CHECK(grid.ring_of(grid.inner_radius * 0.5) == -1);
  CHECK(grid.ring_of(500.0) == 9);
  CHECK(grid.ring_of(grid.radii[3]) == 3);
  CHECK(grid.ring_of(grid.radii[3] + 1e-9) == 4);
  CHECK(grid.ring_of(600.0) == -1);
}

TEST_CASE("cosine law") {
  CHECK(interferer_distance(500.0, 0.0, 1000.0) == doctest::Approx(500.0));
  CHECK(interferer_distance(500.0, std::numbers::pi, 1000.0) == doctest::Approx(1500.0));
  CHECK(interferer_distance(500.0, std::numbers::pi / 2, 1000.0) ==
        doctest::Approx(std::sqrt(1250000.0)).epsilon(1e-12));
  for (int i = 0; i < 100; ++i) {
    const double theta = 2.0 * std::numbers::pi * i / 100.0;
    for (double r : {10.0, 250.0, 499.0}) {
      const double d = interferer_distance(r, theta, 1000.0);
      CHECK(d >= 1000.0 - r - 1e-9);
      CHECK(d <= 1000.0 + r + 1e-9);
    }
  }
}

TEST_CASE("segment grid") {
  const NetworkConfig config;
  const SegmentGrid grid = build_segment_grid(config, 20);
  CHECK(grid.width == doctest::Approx(50.0));
  CHECK(grid.centers[0] == doctest::Approx(525.0));
  CHECK(grid.size() * grid.width == doctest::Approx(1000.0).epsilon(1e-12));
  for (int m = 1; m < grid.size(); ++m) CHECK(grid.centers[m] - grid.centers[m - 1] == doctest::Approx(50.0));
  CHECK(grid.segment_of(500.0) == 0);
  CHECK(grid.segment_of(549.999) == 0);
  CHECK(grid.segment_of(550.0) == 1);
  CHECK(grid.segment_of(1500.0) == 19);

  const SegmentGrid single = build_segment_grid(config, 1);
  CHECK(single.centers[0] == doctest::Approx(1000.0));
  CHECK_THROWS_AS(build_segment_grid(config, 0), InvalidArgument);
}

TEST_CASE("angular grid") {
  const AngularGrid grid = build_angular_grid(180);
  CHECK(grid.mass() == doctest::Approx(1.0 / 180.0));
  for (int i = 0; i < grid.size(); ++i) {
    CHECK(grid.angles[i] > 0.0);
    CHECK(grid.angles[i] < 2.0 * std::numbers::pi);
  }
  CHECK(grid.angles[0] == doctest::Approx(std::numbers::pi / 180.0));
  CHECK_THROWS_AS(build_angular_grid(0), InvalidArgument);
}

TEST_CASE("config validation and link constant") {
  NetworkConfig config;
  CHECK(config.k_bar() == config.p_max * config.c_pl / config.sigma2);
  config.beta = 0.0;
  CHECK_THROWS_AS(config.validate(), InvalidArgument);
  config = NetworkConfig{};
  config.num_users = 0;
  CHECK_THROWS_AS(config.validate(), InvalidArgument);
}
