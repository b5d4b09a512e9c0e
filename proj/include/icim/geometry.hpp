#pragma once

#include <Eigen/Dense>
#include <cmath>

namespace icim {

/// Physical constants of the uplink network. Powers are linear (W), lengths
/// in metres. Received powers downstream are expressed in units of the noise
/// power, so `k_bar()` is the link constant P_max * C / sigma^2.
struct NetworkConfig {
  double p_max = 1.0;
  double c_pl = 1e6;
  double sigma2 = 3.981071705534973e-21;  // -174 dBm
  double beta = 2.6;
  double radius = 500.0;
  int num_users = 50;
  int num_interferers = 6;
  double bs_distance = 1000.0;

  double k_bar() const { return p_max * c_pl / sigma2; }

  /// Throws InvalidArgument when a field is out of range.
  void validate() const;

  /// Defaults used throughout the figure presets.
  static NetworkConfig defaults() { return {}; }
};

/// Concentric rings with a constant path-loss decay of `kappa_db` each.
/// Ring k (0-based, innermost first) spans (edge(k), radii[k]]; the disc inside
/// `inner_radius` holds users that are never scheduled.
struct RingGrid {
  double kappa_db = 0.0;
  double inner_radius = 0.0;
  Eigen::VectorXd radii;
  Eigen::VectorXd widths;
  Eigen::VectorXi users;

  int size() const { return static_cast<int>(radii.size()); }
  int total_users() const { return users.sum(); }
  double inner_edge(int k) const { return k == 0 ? inner_radius : radii[k - 1]; }

  /// Index of the ring containing distance r, or -1 inside the excluded disc
  /// (or beyond the cell edge).
  int ring_of(double r) const;
};

RingGrid build_ring_grid(const NetworkConfig& config, double kappa_db);

/// Midpoint discretisation of the uniform user angle.
struct AngularGrid {
  Eigen::VectorXd angles;

  int size() const { return static_cast<int>(angles.size()); }
  double mass() const { return 1.0 / static_cast<double>(angles.size()); }
};

AngularGrid build_angular_grid(int count);

/// Uniform bins over [D - R, D + R] for the interferer distance.
struct SegmentGrid {
  double lower = 0.0;
  double width = 0.0;
  Eigen::VectorXd centers;

  int size() const { return static_cast<int>(centers.size()); }
  double upper() const { return lower + width * static_cast<double>(centers.size()); }

  /// Bin index for a distance; bins are half-open [lo, hi) with the upper
  /// boundary folded into the last bin.
  int segment_of(double distance) const;
};

SegmentGrid build_segment_grid(const NetworkConfig& config, int m_segments);

/// Distance from a user at polar position (r, theta) around its own base
/// station to a base station located a distance d away.
template <typename Scalar>
Scalar interferer_distance(Scalar r, Scalar theta, Scalar d) {
  using std::cos;
  using std::sqrt;
  const Scalar sq = r * r + d * d - Scalar(2) * r * d * cos(theta);
  return sqrt(sq > Scalar(0) ? sq : Scalar(0));
}

}  // namespace icim
