#include "icim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <vector>

#include "icim/error.hpp"

namespace icim {

namespace {

using cplx = std::complex<double>;

// Log spacing of the statistic grid: 0.01, or finer for channel laws narrower
// than ~10% in relative spread.
double log_step(const ChannelModel& model) {
  return std::min(0.01, 0.1 * std::sqrt(variance(model)) / mean(model));
}

Eigen::VectorXd log_grid(double lo, double hi, double step_target) {
  const int panels = std::max(1, static_cast<int>(std::ceil(std::log(hi / lo) / (2.0 * step_target))));
  const int n = 2 * panels + 1;
  const double step = std::log(hi / lo) / (n - 1);
  Eigen::VectorXd nodes(n);
  for (int j = 0; j < n; ++j) nodes[j] = lo * std::exp(j * step);
  nodes[n - 1] = hi;
  return nodes;
}

// Tabulates the contest densities on `nodes`: for every surviving set in
// `sets` (with its probability) and every ring k in it,
//   u_k s_k f(t s_k) F(t s_k)^(u_k - 1) prod_{i != k, i in set} F(t s_i)^u_i.
Eigen::MatrixXd contest_density(const Eigen::VectorXd& nodes, const ChannelModel& model,
                                const Eigen::VectorXd& scale, const Eigen::VectorXi& users,
                                const std::vector<std::pair<std::uint64_t, double>>& sets) {
  const int rings = static_cast<int>(users.size());
  const Eigen::Index n = nodes.size();
  Eigen::MatrixXd log_cdfs(rings, n);
  Eigen::MatrixXd pdfs(rings, n);
  for (int i = 0; i < rings; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      log_cdfs(i, j) = log_cdf(model, nodes[j] * scale[i]);
      pdfs(i, j) = pdf(model, nodes[j] * scale[i]);
    }
  }
  Eigen::MatrixXd density = Eigen::MatrixXd::Zero(rings, n);
  for (const auto& [mask, probability] : sets) {
    for (Eigen::Index j = 0; j < n; ++j) {
      double total = 0.0;
      for (int i = 0; i < rings; ++i) {
        if (mask >> i & 1U) total += users[i] * log_cdfs(i, j);
      }
      for (int k = 0; k < rings; ++k) {
        if (!(mask >> k & 1U)) continue;
        double rest = 0.0;
        if (std::isfinite(log_cdfs(k, j))) {
          rest = total - log_cdfs(k, j);
        } else {
          for (int i = 0; i < rings; ++i) {
            if (i != k && (mask >> i & 1U)) rest += users[i] * log_cdfs(i, j);
          }
          if (users[k] > 1) continue;
        }
        if (rest < -745.0) continue;
        density(k, j) += probability * users[k] * scale[k] * pdfs(k, j) * std::exp(rest);
      }
    }
  }
  return density;
}

std::uint64_t all_rings(int rings) { return (std::uint64_t{1} << rings) - 1; }

Eigen::VectorXd ring_gains(const RingGrid& grid, const NetworkConfig& config) {
  Eigen::VectorXd gains(grid.size());
  for (int k = 0; k < grid.size(); ++k) gains[k] = config.k_bar() * std::pow(grid.radii[k], -config.beta);
  return gains;
}

SignalLaw contest_law(Scheme scheme, int slot, const RingGrid& grid, const ChannelModel& model,
                      const NetworkConfig& config, const std::vector<std::pair<std::uint64_t, double>>& sets) {
  const Eigen::VectorXd scale = contest_scales(scheme, grid, model, config);
  const auto [lo, hi] = support_range(model);
  Eigen::VectorXd nodes = log_grid(lo / scale.maxCoeff(), hi / scale.minCoeff(), log_step(model));
  Eigen::MatrixXd density = contest_density(nodes, model, scale, grid.users, sets);
  Eigen::VectorXd multipliers = ring_gains(grid, config).cwiseProduct(scale);
  return SignalLaw(scheme, slot, std::move(nodes), std::move(multipliers), std::move(density));
}

// Moments int_{-a}^{b} exp(-lambda tau) tau^p dtau, p = 0, 1, 2, each scaled by
// exp(-lambda c) where c is the panel's middle node; e0 and e2 are exp(-lambda t)
// at the panel ends and e1 at c.
struct Moments {
  cplx m0, m1, m2;
};

Moments panel_moments(cplx lambda, double a, double b, cplx e0, cplx e1, cplx e2) {
  const double width = std::max(a, b);
  if (std::abs(lambda) * width < 0.5) {
    // Taylor series of exp(-lambda tau): term n integrates tau^(n + p).
    Moments m{0.0, 0.0, 0.0};
    cplx coefficient = 1.0;
    double bp = b;    // b^(n + 1)
    double ap = -a;   // (-a)^(n + 1)
    for (int n = 0; n < 60; ++n) {
      const cplx t0 = coefficient * ((bp - ap) / (n + 1));
      m.m0 += t0;
      m.m1 += coefficient * ((bp * b + ap * a) / (n + 2));
      m.m2 += coefficient * ((bp * b * b - ap * a * a) / (n + 3));
      if (std::abs(t0) <= 1e-17 * std::abs(m.m0)) break;
      bp *= b;
      ap *= -a;
      coefficient *= -lambda / double(n + 1);
    }
    return {m.m0 * e1, m.m1 * e1, m.m2 * e1};
  }
  const cplx inv = 1.0 / lambda;
  const cplx m0 = (e0 - e2) * inv;
  const cplx m1 = (-b * e2 - a * e0) * inv + m0 * inv;
  const cplx m2 = (-b * b * e2 + a * a * e0) * inv + 2.0 * m1 * inv;
  return {m0, m1, m2};
}

}  // namespace

SignalLaw::SignalLaw(Scheme scheme, int slot, Eigen::VectorXd nodes, Eigen::VectorXd multipliers,
                     Eigen::MatrixXd density)
    : scheme_(scheme),
      slot_(slot),
      nodes_(std::move(nodes)),
      multipliers_(std::move(multipliers)),
      density_(std::move(density)) {
  const Eigen::Index n = nodes_.size();
  if (n < 3 || n % 2 == 0) throw InvalidArgument("signal law: node count must be odd and at least 3");
  if (density_.cols() != n || density_.rows() != multipliers_.size()) {
    throw InvalidArgument("signal law: density shape does not match the grid");
  }
  const Eigen::Index panels = (n - 1) / 2;
  weights_ = Eigen::VectorXd::Zero(n);
  cumulative_ = Eigen::MatrixXd::Zero(density_.rows(), panels + 1);
  for (Eigen::Index p = 0; p < panels; ++p) {
    const double a = nodes_[2 * p + 1] - nodes_[2 * p];
    const double b = nodes_[2 * p + 2] - nodes_[2 * p + 1];
    if (!(a > 0.0 && b > 0.0)) throw InvalidArgument("signal law: nodes must increase");
    // Integral of the quadratic through the three nodes.
    const double w0 = (a + b) * (2.0 * a - b) / (6.0 * a);
    const double w1 = std::pow(a + b, 3) / (6.0 * a * b);
    const double w2 = (a + b) * (2.0 * b - a) / (6.0 * b);
    weights_[2 * p] += w0;
    weights_[2 * p + 1] += w1;
    weights_[2 * p + 2] += w2;
    cumulative_.col(p + 1) = cumulative_.col(p) + w0 * density_.col(2 * p) + w1 * density_.col(2 * p + 1) +
                             w2 * density_.col(2 * p + 2);
  }
}

Eigen::VectorXd SignalLaw::component_masses() const { return density_ * weights_; }

double SignalLaw::mean() const {
  return multipliers_.dot(density_ * weights_.cwiseProduct(nodes_));
}

double SignalLaw::cdf(double x) const {
  if (!(x > 0.0)) return 0.0;
  const Eigen::Index n = nodes_.size();
  const double lo = nodes_[0];
  const double hi = nodes_[n - 1];
  const Eigen::Index panels = (n - 1) / 2;
  const double panel_log = std::log(hi / lo) / static_cast<double>(panels);
  double total = 0.0;
  for (int k = 0; k < components(); ++k) {
    const double t = x / multipliers_[k];
    if (t <= lo) continue;
    if (t >= hi) {
      total += cumulative_(k, panels);
      continue;
    }
    Eigen::Index p = static_cast<Eigen::Index>(std::log(t / lo) / panel_log);
    p = std::clamp<Eigen::Index>(p, 0, panels - 1);
    while (p > 0 && t < nodes_[2 * p]) --p;
    while (p + 1 < panels && t > nodes_[2 * p + 2]) ++p;
    const double a = nodes_[2 * p + 1] - nodes_[2 * p];
    const double b = nodes_[2 * p + 2] - nodes_[2 * p + 1];
    const double f0 = density_(k, 2 * p);
    const double f1 = density_(k, 2 * p + 1);
    const double f2 = density_(k, 2 * p + 2);
    const double c2 = (a * (f2 - f1) + b * (f0 - f1)) / (a * b * (a + b));
    const double c1 = (f2 - f1 - c2 * b * b) / b;
    const double tau = t - nodes_[2 * p + 1];
    const double partial =
        f1 * (tau + a) + c1 * (tau * tau - a * a) / 2.0 + c2 * (tau * tau * tau + a * a * a) / 3.0;
    total += cumulative_(k, p) + partial;
  }
  return std::clamp(total, 0.0, 1.0);
}

std::complex<double> SignalLaw::laplace(std::complex<double> s) const {
  if (s.real() < 0.0) throw DomainError("signal law: laplace needs Re(s) >= 0");
  const Eigen::Index n = nodes_.size();
  const Eigen::Index panels = (n - 1) / 2;
  std::vector<cplx> e(static_cast<std::size_t>(n));
  cplx total = 0.0;
  for (int k = 0; k < components(); ++k) {
    const cplx lambda = s * multipliers_[k];
    for (Eigen::Index j = 0; j < n; ++j) e[j] = std::exp(-lambda * nodes_[j]);
    for (Eigen::Index p = 0; p < panels; ++p) {
      const double f0 = density_(k, 2 * p);
      const double f1 = density_(k, 2 * p + 1);
      const double f2 = density_(k, 2 * p + 2);
      if (f0 == 0.0 && f1 == 0.0 && f2 == 0.0) continue;
      const double a = nodes_[2 * p + 1] - nodes_[2 * p];
      const double b = nodes_[2 * p + 2] - nodes_[2 * p + 1];
      const double c2 = (a * (f2 - f1) + b * (f0 - f1)) / (a * b * (a + b));
      const double c1 = (f2 - f1 - c2 * b * b) / b;
      const Moments m = panel_moments(lambda, a, b, e[2 * p], e[2 * p + 1], e[2 * p + 2]);
      total += f1 * m.m0 + c1 * m.m1 + c2 * m.m2;
    }
  }
  return total;
}

double SignalLaw::laplace_complement(double s) const {
  if (s < 0.0) throw DomainError("signal law: laplace complement needs s >= 0");
  double total = 0.0;
  for (int k = 0; k < components(); ++k) {
    const double rate = s * multipliers_[k];
    for (Eigen::Index j = 0; j < nodes_.size(); ++j) {
      const double f = density_(k, j);
      if (f != 0.0) total -= weights_[j] * f * std::expm1(-rate * nodes_[j]);
    }
  }
  return total;
}

SignalLaw signal_law(const LocationPmf& pmf, const RingGrid& grid, const ChannelModel& model,
                     const NetworkConfig& config) {
  if (pmf.size() != grid.size()) throw InvalidArgument("signal law: PMF and ring grid differ in size");
  switch (pmf.scheme) {
    case Scheme::Greedy:
    case Scheme::ProportionalFair:
      return contest_law(pmf.scheme, 0, grid, model, config, {{all_rings(grid.size()), 1.0}});
    case Scheme::GreedyRoundRobin: {
      const GreedyRoundRobin sweep(grid, model, config, pmf.slot);
      return signal_law(sweep, pmf.slot, grid, model, config);
    }
    case Scheme::RoundRobin:
    case Scheme::LocationRoundRobin: {
      // The served user is not chosen by its channel, so X0 is the channel law
      // scaled by the ring gain.
      const auto [lo, hi] = support_range(model);
      Eigen::VectorXd nodes = log_grid(lo, hi, log_step(model));
      Eigen::MatrixXd density(grid.size(), nodes.size());
      for (Eigen::Index j = 0; j < nodes.size(); ++j) {
        const double f = pdf(model, nodes[j]);
        density.col(j) = pmf.masses * f;
      }
      return SignalLaw(pmf.scheme, pmf.slot, std::move(nodes), ring_gains(grid, config), std::move(density));
    }
  }
  throw InvalidArgument("signal law: unknown scheme");
}

SignalLaw signal_law(const GreedyRoundRobin& sweep, int slot, const RingGrid& grid, const ChannelModel& model,
                     const NetworkConfig& config) {
  const auto& survivors = sweep.survivors(slot);
  const std::vector<std::pair<std::uint64_t, double>> sets(survivors.begin(), survivors.end());
  return contest_law(Scheme::GreedyRoundRobin, slot, grid, model, config, sets);
}

double outage_probability(double q, const SignalLaw& signal, const InterferenceTransform& interference,
                          double tol) {
  if (!(q > 0.0)) throw InvalidArgument("outage probability: threshold must be positive");
  auto cf = [&](double w) { return interference.cf(q * w) * signal.laplace(cplx(0.0, w)); };
  const double trunc = 10.0 / (q * interference.mean() + signal.mean());
  try {
    return 1.0 - cf_to_cdf(cf, 0.0, trunc, tol);
  } catch (const ConvergenceError& e) {
    throw ConvergenceError(std::string("outage probability: ") + e.what(), 1.0 - e.partial_estimate());
  }
}

double ergodic_capacity(const SignalLaw& signal, const InterferenceTransform& interference, double noise,
                        const QuadratureRule& rule) {
  if (noise < 0.0) throw InvalidArgument("ergodic capacity: noise must be non-negative");
  const bool interfered = interference.cells() > 0;
  if (!interfered && noise == 0.0) throw InvalidArgument("ergodic capacity: unbounded without noise or interference");

  auto integrand = [&](double u) {
    const double t = std::exp(u);
    const double carrier = noise > 0.0 ? std::exp(-noise * t) : 1.0;
    if (carrier == 0.0) return 0.0;
    const double shield = interfered ? interference(t).real() : 1.0;
    return shield * carrier * signal.laplace_complement(t);
  };
  auto laguerre = [&](double origin, double direction) {
    double sum = 0.0;
    for (int i = 0; i < rule.order(); ++i) {
      const double xi = rule.nodes[i];
      sum += rule.weights[i] * std::exp(xi) * integrand(origin + direction * xi);
    }
    return sum;
  };

  // 1 - L_X0(t) switches on near t = 1 / E[X0]; L_Y(t) exp(-n t) switches off
  // near t = 1 / max(E[Y], n).
  const double on = -std::log(signal.mean());
  double off = std::numeric_limits<double>::infinity();
  if (interfered) off = -std::log(interference.mean());
  if (noise > 0.0) off = std::min(off, -std::log(noise));

  double total = 0.0;
  if (on < off) {
    total = laguerre(on, -1.0) + laguerre(off, 1.0);
    IntegrationOptions options;
    options.abs_tol = 1e-12;
    total += integrate_interval(integrand, on, off, 1e-11, options);
  } else {
    const double middle = 0.5 * (on + off);
    total = laguerre(middle, -1.0) + laguerre(middle, 1.0);
  }
  return total / std::numbers::ln2;
}

CapacityResult ergodic_capacity(const SignalLaw& signal, const InterferenceTransform& interference, double noise,
                                int order, int check_order, double max_relative_difference) {
  CapacityResult result;
  result.order = order;
  result.check_order = check_order;
  result.value = ergodic_capacity(signal, interference, noise, gauss_laguerre(order));
  result.check = ergodic_capacity(signal, interference, noise, gauss_laguerre(check_order));
  if (!(result.relative_difference() <= max_relative_difference)) {
    std::ostringstream os;
    os << "ergodic capacity: orders " << order << " and " << check_order << " differ by "
       << result.relative_difference() << " (relative)";
    throw ConvergenceError(os.str(), result.value);
  }
  return result;
}

FairnessResult average_fairness(const LocationPmf& pmf, const RingGrid& grid, int u_total) {
  if (pmf.size() != grid.size()) throw InvalidArgument("fairness: PMF and ring grid differ in size");
  if (u_total < 1) throw InvalidArgument("fairness: need at least one user");
  FairnessResult result;
  result.per_user = pmf.masses.cwiseQuotient(grid.users.cast<double>());
  if (u_total == 1) return result;
  double entropy = 0.0;
  for (int k = 0; k < grid.size(); ++k) {
    const double p = pmf.masses[k];
    if (p > 0.0) entropy -= p * std::log(result.per_user[k]);
  }
  result.value = entropy / std::log(static_cast<double>(u_total));
  return result;
}

double greedy_rr_fairness(const GreedyRoundRobin& sweep, const RingGrid& grid, int slot) {
  double total = 0.0;
  for (const auto& [mask, probability] : sweep.survivors(slot)) {
    LocationPmf pmf;
    pmf.scheme = Scheme::GreedyRoundRobin;
    pmf.slot = slot;
    pmf.radii = grid.radii;
    pmf.masses = sweep.contest(mask);
    int contenders = 0;
    for (int k = 0; k < grid.size(); ++k) {
      if (mask >> k & 1U) contenders += grid.users[k];
    }
    total += probability * average_fairness(pmf, grid, contenders).value;
  }
  return total;
}

double location_rr_fairness(const RingGrid& grid, int slot) {
  return average_fairness(location_rr_pmf(grid, slot), grid, grid.users[slot - 1]).value;
}

double slot_average(const std::function<double(int)>& metric, int slots) {
  if (slots < 1) throw InvalidArgument("slot average: need at least one slot");
  double sum = 0.0;
  for (int w = 1; w <= slots; ++w) sum += metric(w);
  return sum / slots;
}

}  // namespace icim
