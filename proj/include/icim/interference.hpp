#pragma once

#include <Eigen/Dense>
#include <complex>
#include <string>

#include "icim/fading.hpp"
#include "icim/geometry.hpp"
#include "icim/scheduling.hpp"

namespace icim {

/// P(distance from an interfering cell's scheduled user to the reference base
/// station falls in segment m).
struct InterfererDistancePmf {
  Scheme scheme = Scheme::Greedy;
  int slot = 0;
  SegmentGrid segments;
  Eigen::VectorXd masses;

  double mean_distance() const { return segments.centers.dot(masses); }
};

/// Maps every (ring, angle) cell of the joint PMF through the cosine law and
/// deposits its mass into the containing segment.
InterfererDistancePmf interferer_pmf(const JointLocationPmf& joint, const SegmentGrid& segments, double d);

/// Density of one cell's interference power (in units of the noise power).
double per_cell_pdf(const InterfererDistancePmf& pmf, const ChannelModel& chi, const NetworkConfig& config,
                    double x);

enum class TransformMethod { RayleighClosed, GammaClosed, GKWhittaker, NumericGeneric };

std::string to_string(TransformMethod method);

/// Laplace transform E[exp(-sX)] of the per-cell interference, a mixture over
/// segments of the interfering channel law scaled by c_m = K_bar r_m^-beta, and
/// of the cumulative interference Y over `cells()` i.i.d. cells.
class InterferenceTransform {
 public:
  InterferenceTransform(const InterfererDistancePmf& pmf, const ChannelModel& chi, const NetworkConfig& config,
                        TransformMethod method);

  TransformMethod method() const { return method_; }
  int cells() const { return cells_; }
  const ChannelModel& chi() const { return chi_; }
  const Eigen::VectorXd& gains() const { return gains_; }
  const Eigen::VectorXd& weights() const { return weights_; }

  /// Per-cell transform. Throws DomainError outside the convergence strip.
  std::complex<double> per_cell(std::complex<double> s) const;
  /// Per-cell transform by direct quadrature of exp(-sx) against the mixture
  /// density, independent of the closed forms.
  std::complex<double> per_cell_numeric(std::complex<double> s) const;
  /// Cumulative transform, the per-cell transform to the power L.
  std::complex<double> operator()(std::complex<double> s) const;
  /// Characteristic function E[exp(j w Y)].
  std::complex<double> cf(double w) const { return (*this)(std::complex<double>(0.0, -w)); }

  double per_cell_mean() const;
  double mean() const { return cells_ * per_cell_mean(); }
  /// Leftmost real s for which the transform converges.
  double abscissa() const;

 private:
  ChannelModel chi_;
  Eigen::VectorXd gains_;
  Eigen::VectorXd weights_;
  int cells_ = 0;
  TransformMethod method_;
};

/// Picks the closed form matching the channel law.
InterferenceTransform cumulative_transform(const InterfererDistancePmf& pmf, const ChannelModel& chi,
                                           const NetworkConfig& config);

/// CDF of the cumulative interference at each x, by characteristic-function
/// inversion.
Eigen::VectorXd transform_to_cdf(const InterferenceTransform& transform, const Eigen::VectorXd& xs,
                                 double tol = 1e-6);

}  // namespace icim
