#include "icim/interference.hpp"

#include <cmath>
#include <sstream>

#include "icim/error.hpp"
#include "icim/quadrature.hpp"

namespace icim {

namespace {

using cplx = std::complex<double>;

}  // namespace

InterfererDistancePmf interferer_pmf(const JointLocationPmf& joint, const SegmentGrid& segments, double d) {
  InterfererDistancePmf pmf;
  pmf.scheme = joint.scheme;
  pmf.slot = joint.slot;
  pmf.segments = segments;
  pmf.masses = Eigen::VectorXd::Zero(segments.size());
  for (Eigen::Index k = 0; k < joint.masses.rows(); ++k) {
    for (Eigen::Index i = 0; i < joint.masses.cols(); ++i) {
      const double mass = joint.masses(k, i);
      if (mass == 0.0) continue;
      pmf.masses[segments.segment_of(interferer_distance(joint.radii[k], joint.angles[i], d))] += mass;
    }
  }
  return pmf;
}

double per_cell_pdf(const InterfererDistancePmf& pmf, const ChannelModel& chi, const NetworkConfig& config,
                    double x) {
  if (!(x > 0.0)) throw InvalidArgument("per_cell_pdf: x must be positive");
  double density = 0.0;
  for (int m = 0; m < pmf.segments.size(); ++m) {
    if (pmf.masses[m] == 0.0) continue;
    const double scale = std::pow(pmf.segments.centers[m], config.beta) / config.k_bar();
    density += pdf(chi, x * scale) * scale * pmf.masses[m];
  }
  return density;
}

std::string to_string(TransformMethod method) {
  switch (method) {
    case TransformMethod::RayleighClosed: return "rayleigh_closed";
    case TransformMethod::GammaClosed: return "gamma_closed";
    case TransformMethod::GKWhittaker: return "gk_whittaker";
    case TransformMethod::NumericGeneric: return "numeric";
  }
  return "unknown";
}

InterferenceTransform::InterferenceTransform(const InterfererDistancePmf& pmf, const ChannelModel& chi,
                                             const NetworkConfig& config, TransformMethod method)
    : chi_(chi), cells_(config.num_interferers), method_(method) {
  int support = 0;
  for (int m = 0; m < pmf.masses.size(); ++m) support += pmf.masses[m] > 0.0;
  gains_.resize(support);
  weights_.resize(support);
  int j = 0;
  for (int m = 0; m < pmf.masses.size(); ++m) {
    if (!(pmf.masses[m] > 0.0)) continue;
    gains_[j] = config.k_bar() * std::pow(pmf.segments.centers[m], -config.beta);
    weights_[j] = pmf.masses[m];
    ++j;
  }
  if (support == 0) throw InvalidArgument("interference transform: distance PMF has no mass");
}

double InterferenceTransform::per_cell_mean() const { return weights_.dot(gains_) * icim::mean(chi_); }

double InterferenceTransform::abscissa() const { return laplace_abscissa(chi_) / gains_.maxCoeff(); }

std::complex<double> InterferenceTransform::per_cell(std::complex<double> s) const {
  const double edge = abscissa();
  const bool inside = std::holds_alternative<GeneralizedK>(chi_) ? s.real() >= edge : s.real() > edge;
  if (!inside) {
    std::ostringstream os;
    os << "interference transform: Re(s) = " << s.real() << " lies outside the convergence strip (edge "
       << edge << ")";
    throw DomainError(os.str());
  }
  if (method_ == TransformMethod::NumericGeneric) return per_cell_numeric(s);
  cplx total = 0.0;
  for (int m = 0; m < gains_.size(); ++m) total += weights_[m] * laplace(chi_, gains_[m] * s);
  return total;
}

std::complex<double> InterferenceTransform::per_cell_numeric(std::complex<double> s) const {
  const auto [lo, hi] = support_range(chi_);
  auto integrand = [&](double x) {
    double density = 0.0;
    for (int m = 0; m < gains_.size(); ++m) density += weights_[m] * pdf(chi_, x / gains_[m]) / gains_[m];
    return std::exp(-s * x) * density;
  };
  return integrate_octaves(integrand, lo * gains_.minCoeff(), hi * gains_.maxCoeff(), 1e-10, 1e-13);
}

std::complex<double> InterferenceTransform::operator()(std::complex<double> s) const {
  if (cells_ == 0) return 1.0;
  return std::pow(per_cell(s), cells_);
}

InterferenceTransform cumulative_transform(const InterfererDistancePmf& pmf, const ChannelModel& chi,
                                           const NetworkConfig& config) {
  TransformMethod method = TransformMethod::NumericGeneric;
  if (std::holds_alternative<Exponential>(chi)) method = TransformMethod::RayleighClosed;
  if (std::holds_alternative<Gamma>(chi)) method = TransformMethod::GammaClosed;
  if (std::holds_alternative<GeneralizedK>(chi)) method = TransformMethod::GKWhittaker;
  return InterferenceTransform(pmf, chi, config, method);
}

Eigen::VectorXd transform_to_cdf(const InterferenceTransform& transform, const Eigen::VectorXd& xs,
                                 double tol) {
  Eigen::VectorXd out(xs.size());
  if (transform.cells() == 0) {
    for (Eigen::Index i = 0; i < xs.size(); ++i) out[i] = xs[i] >= 0.0 ? 1.0 : 0.0;
    return out;
  }
  const double trunc = 10.0 / transform.mean();
  auto cf = [&transform](double w) { return transform.cf(w); };
  for (Eigen::Index i = 0; i < xs.size(); ++i) {
    try {
      out[i] = cf_to_cdf(cf, xs[i], trunc, tol);
    } catch (const ConvergenceError& e) {
      std::ostringstream os;
      os << "interference cdf at x = " << xs[i] << ": " << e.what();
      throw ConvergenceError(os.str(), e.partial_estimate());
    }
  }
  return out;
}

}  // namespace icim
