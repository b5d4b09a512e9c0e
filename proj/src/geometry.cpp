#include "icim/geometry.hpp"

#include <algorithm>
#include <numbers>
#include <string>
#include <vector>

#include "icim/error.hpp"

namespace icim {

namespace {

void require(bool condition, const std::string& message) {
  if (!condition) throw InvalidArgument(message);
}

}  // namespace

void NetworkConfig::validate() const {
  require(p_max > 0.0, "p_max must be positive");
  require(c_pl > 0.0, "c_pl must be positive");
  require(sigma2 > 0.0, "sigma2 must be positive");
  require(beta > 0.0, "beta must be positive");
  require(radius > 0.0, "radius must be positive");
  require(num_users >= 1, "num_users must be at least 1");
  require(num_interferers >= 0, "num_interferers must be non-negative");
  require(bs_distance > radius, "bs_distance must exceed the cell radius");
}

int RingGrid::ring_of(double r) const {
  if (r <= inner_radius || radii.size() == 0 || r > radii[radii.size() - 1]) return -1;
  // First ring whose outer radius is >= r.
  const double* begin = radii.data();
  const double* end = begin + radii.size();
  return static_cast<int>(std::lower_bound(begin, end, r) - begin);
}

RingGrid build_ring_grid(const NetworkConfig& config, double kappa_db) {
  config.validate();
  require(kappa_db > 0.0, "kappa must be positive");

  const double step = std::pow(10.0, kappa_db / (10.0 * config.beta));
  const double r2 = config.radius * config.radius;

  std::vector<double> radii;
  std::vector<int> users;
  double outer = config.radius;
  for (;;) {
    const double inner = outer / step;
    const double expected = config.num_users * (outer * outer - inner * inner) / r2;
    const int rounded = static_cast<int>(std::floor(expected + 0.5));
    if (rounded <= 0) break;
    radii.push_back(outer);
    users.push_back(rounded);
    outer = inner;
  }
  require(!radii.empty(), "the outermost ring rounds to zero users");

  RingGrid grid;
  grid.kappa_db = kappa_db;
  grid.inner_radius = outer;
  const auto count = static_cast<Eigen::Index>(radii.size());
  grid.radii.resize(count);
  grid.users.resize(count);
  grid.widths.resize(count);
  for (Eigen::Index k = 0; k < count; ++k) {
    grid.radii[k] = radii[radii.size() - 1 - k];
    grid.users[k] = users[users.size() - 1 - k];
  }
  // The recursion is anchored at R; pin the last radius exactly.
  grid.radii[count - 1] = config.radius;
  for (Eigen::Index k = 0; k < count; ++k) {
    grid.widths[k] = grid.radii[k] - grid.inner_edge(static_cast<int>(k));
  }
  return grid;
}

AngularGrid build_angular_grid(int count) {
  require(count >= 1, "angular bin count must be at least 1");
  AngularGrid grid;
  grid.angles.resize(count);
  for (int i = 0; i < count; ++i) {
    grid.angles[i] = 2.0 * std::numbers::pi * (i + 0.5) / count;
  }
  return grid;
}

SegmentGrid build_segment_grid(const NetworkConfig& config, int m_segments) {
  config.validate();
  require(m_segments >= 1, "segment count must be at least 1");
  SegmentGrid grid;
  grid.lower = config.bs_distance - config.radius;
  grid.width = 2.0 * config.radius / m_segments;
  grid.centers.resize(m_segments);
  for (int m = 0; m < m_segments; ++m) {
    grid.centers[m] = grid.lower + (m + 0.5) * grid.width;
  }
  return grid;
}

int SegmentGrid::segment_of(double distance) const {
  const auto idx = static_cast<int>(std::floor((distance - lower) / width));
  return std::clamp(idx, 0, size() - 1);
}

}  // namespace icim
