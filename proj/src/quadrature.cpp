#include "icim/quadrature.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numbers>

namespace icim {

namespace {

struct LaguerreValue {
  double value;
  double derivative;
};

// L_n(x) and L_n'(x) from the three-term recurrence.
LaguerreValue laguerre(int n, double x) {
  double previous = 1.0;
  double current = 1.0 - x;
  if (n == 0) return {1.0, 0.0};
  for (int k = 1; k < n; ++k) {
    const double next = ((2.0 * k + 1.0 - x) * current - k * previous) / (k + 1.0);
    previous = current;
    current = next;
  }
  return {current, n * (current - previous) / x};
}

}  // namespace

QuadratureRule gauss_laguerre(int order) {
  if (order < 1 || order > 64) throw InvalidArgument("gauss_laguerre: order must be in [1, 64]");

  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(order, order);
  for (int i = 0; i < order; ++i) {
    jacobi(i, i) = 2.0 * i + 1.0;
    if (i + 1 < order) {
      jacobi(i, i + 1) = i + 1.0;
      jacobi(i + 1, i) = i + 1.0;
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi, Eigen::EigenvaluesOnly);

  QuadratureRule rule;
  rule.nodes = solver.eigenvalues();
  rule.weights.resize(order);
  for (int i = 0; i < order; ++i) {
    double x = rule.nodes[i];
    for (int iter = 0; iter < 8; ++iter) {
      const LaguerreValue l = laguerre(order, x);
      const double step = l.value / l.derivative;
      x -= step;
      if (std::abs(step) <= 1e-15 * x) break;
    }
    const LaguerreValue l = laguerre(order, x);
    rule.nodes[i] = x;
    rule.weights[i] = 1.0 / (x * l.derivative * l.derivative);
  }
  return rule;
}

double cf_to_cdf(const std::function<std::complex<double>(double)>& cf, double x, double trunc,
                 double tol) {
  if (!(trunc > 0.0)) throw InvalidArgument("cf_to_cdf: trunc must be positive");
  if (!(tol > 0.0)) throw InvalidArgument("cf_to_cdf: tol must be positive");

  auto integrand = [&cf, x](double w) {
    if (w == 0.0) return 0.0;
    return std::imag(std::exp(std::complex<double>(0.0, -w * x)) * cf(w)) / w;
  };
  IntegrationOptions options;
  options.abs_tol = 1e-3 * tol;
  // exp(-j w x) turns over trunc |x| / pi half-periods on [0, trunc]; give each a few panels.
  auto budget = [x](double width) {
    return static_cast<int>(std::min(1e6, 1000.0 + 4.0 * width * std::abs(x) / std::numbers::pi));
  };
  options.max_intervals = budget(trunc);

  double integral = 0.0;
  try {
    integral = integrate_interval(integrand, 0.0, trunc, 1e-9, options);
  } catch (const ConvergenceError& e) {
    const double partial = 0.5 - e.partial_estimate() / std::numbers::pi;
    throw ConvergenceError(std::string("cf_to_cdf: ") + e.what(), std::clamp(partial, 0.0, 1.0));
  }

  // Oscillation can make one octave small by accident; require two in a row.
  double upper = trunc;
  int quiet = 0;
  for (int octave = 0; octave < 64 && quiet < 2; ++octave) {
    double piece = 0.0;
    options.max_intervals = budget(upper);
    try {
      piece = integrate_interval(integrand, upper, 2.0 * upper, 1e-9, options);
    } catch (const ConvergenceError& e) {
      piece = e.partial_estimate();
    }
    integral += piece;
    upper *= 2.0;
    quiet = std::abs(piece) / std::numbers::pi < tol ? quiet + 1 : 0;
  }
  const double cdf = std::clamp(0.5 - integral / std::numbers::pi, 0.0, 1.0);
  if (quiet < 2) throw ConvergenceError("cf_to_cdf: tail did not settle within 64 octaves", cdf);
  return cdf;
}

}  // namespace icim
