#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <sstream>
#include <type_traits>
#include <vector>

#include "icim/error.hpp"

namespace icim {

/// Gauss-Laguerre rule for the weight exp(-x) on (0, inf).
struct QuadratureRule {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;

  int order() const { return static_cast<int>(nodes.size()); }
};

/// Nodes and weights of the E-point rule, 1 <= order <= 64. Nodes come from
/// the eigenvalues of the Jacobi matrix, polished by Newton on L_E; weights use
/// 1 / (x L_E'(x)^2) so tiny weights keep full relative precision.
QuadratureRule gauss_laguerre(int order);

struct IntegrationOptions {
  /// Characteristic length of the integrand for the (0, 1) mapping.
  double scale = 1.0;
  /// Absolute error accepted regardless of the relative target.
  double abs_tol = 0.0;
  /// Subinterval budget of the adaptive rule.
  int max_intervals = 2000;
};

namespace detail {

// 15-point Kronrod nodes on [0, 1) (symmetric about 0) with the Kronrod
// weights and the weights of the embedded 7-point Gauss rule.
inline constexpr double kKronrodNodes[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr double kKronrodWeights[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double kGaussWeights[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

// Size of an integrand value: |x| for scalars, the largest |x_i| for Eigen arrays.
template <typename R>
double magnitude(const R& value) {
  if constexpr (std::is_arithmetic_v<R> || std::is_same_v<R, std::complex<double>>) {
    return std::abs(value);
  } else {
    return value.size() == 0 ? 0.0 : static_cast<double>(value.abs().maxCoeff());
  }
}

template <typename R>
struct Panel {
  double a;
  double b;
  R value;
  double error;
  double l1;
  bool operator<(const Panel& other) const { return error < other.error; }
};

template <typename F>
auto kronrod_panel(F& f, double a, double b) {
  using R = std::decay_t<decltype(f(a))>;
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const R mid = f(center);
  R kronrod = mid * kKronrodWeights[7];
  R gauss = mid * kGaussWeights[3];
  double l1 = magnitude(mid) * kKronrodWeights[7];
  for (int i = 0; i < 7; ++i) {
    const R left = f(center - half * kKronrodNodes[i]);
    const R right = f(center + half * kKronrodNodes[i]);
    kronrod += (left + right) * kKronrodWeights[i];
    l1 += (magnitude(left) + magnitude(right)) * kKronrodWeights[i];
    if (i % 2 == 1) gauss += (left + right) * kGaussWeights[i / 2];
  }
  const R value = kronrod * half;
  const double error = magnitude(R(kronrod - gauss)) * std::abs(half);
  return Panel<R>{a, b, value, error, l1 * std::abs(half)};
}

}  // namespace detail

/// Globally adaptive 15-point Gauss-Kronrod integration over [a, b]: the panel
/// with the largest error estimate is bisected until the summed estimate drops
/// below max(rel_tol |I|, abs_tol). Works for real, complex and Eigen array
/// integrands; for arrays |.| is the largest component. Throws
/// ConvergenceError, carrying the real part of a scalar estimate, when the
/// panel budget runs out.
template <typename F>
auto integrate_interval(F&& f, double a, double b, double rel_tol, IntegrationOptions options = {}) {
  using R = std::decay_t<decltype(f(a))>;
  using Panel = detail::Panel<R>;
  std::vector<Panel> heap{detail::kronrod_panel(f, a, b)};
  R total = heap.front().value;
  double error = heap.front().error;
  auto converged = [&] { return error <= std::max(rel_tol * detail::magnitude(total), options.abs_tol); };
  while (!converged() && static_cast<int>(heap.size()) < options.max_intervals) {
    std::pop_heap(heap.begin(), heap.end());
    const Panel worst = heap.back();
    heap.pop_back();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) break;  // panel cannot shrink further
    Panel left = detail::kronrod_panel(f, worst.a, mid);
    Panel right = detail::kronrod_panel(f, mid, worst.b);
    total += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    heap.push_back(left);
    std::push_heap(heap.begin(), heap.end());
    heap.push_back(right);
    std::push_heap(heap.begin(), heap.end());
  }
  // Re-sum to shed the drift of the running updates.
  total = heap.front().value;
  error = heap.front().error;
  for (std::size_t i = 1; i < heap.size(); ++i) {
    total += heap[i].value;
    error += heap[i].error;
  }
  if (!converged() || !std::isfinite(detail::magnitude(total))) {
    std::ostringstream os;
    os << "integrate_interval: error estimate " << error << " exceeds target "
       << std::max(rel_tol * detail::magnitude(total), options.abs_tol) << " on [" << a << ", " << b << "]";
    double partial = 0.0;
    if constexpr (std::is_arithmetic_v<R> || std::is_same_v<R, std::complex<double>>) partial = std::real(total);
    throw ConvergenceError(os.str(), partial);
  }
  return total;
}

/// Adaptive integration over (0, inf) after the substitution
/// x = scale * t / (1 - t), t in (0, 1).
template <typename F>
auto integrate_semi_infinite(F&& f, double rel_tol, IntegrationOptions options = {}) {
  if (!(rel_tol >= 1e-14 && rel_tol <= 1e-2)) {
    throw InvalidArgument("integrate_semi_infinite: rel_tol out of range");
  }
  const double scale = options.scale;
  auto mapped = [&f, scale](double t) {
    const double one_minus = 1.0 - t;
    const double x = scale * t / one_minus;
    using R = std::decay_t<decltype(f(x))>;
    if (!std::isfinite(x)) return R{};
    return f(x) * (scale / (one_minus * one_minus));
  };
  return integrate_interval(mapped, 0.0, 1.0, rel_tol, options);
}

/// Integral over [lo, hi] split at successive doublings of lo. Suited to
/// integrands spread over many orders of magnitude, where a single adaptive
/// pass can miss a narrow peak. `abs_tol` is shared among the pieces.
template <typename F>
auto integrate_octaves(F&& f, double lo, double hi, double rel_tol, double abs_tol) {
  if (!(lo > 0.0) || !(hi > lo)) throw InvalidArgument("integrate_octaves: need 0 < lo < hi");
  const int pieces = static_cast<int>(std::ceil(std::log2(hi / lo)));
  IntegrationOptions options;
  options.abs_tol = abs_tol / pieces;
  options.max_intervals = 500;
  const double first = std::min(2.0 * lo, hi);
  auto total = integrate_interval(f, lo, first, rel_tol, options);
  double a = first;
  for (int i = 1; i < pieces; ++i) {
    const double b = i + 1 == pieces ? hi : 2.0 * a;
    total += integrate_interval(f, a, b, rel_tol, options);
    a = b;
  }
  return total;
}

/// CDF at x of the law with characteristic function `cf`, by Gil-Pelaez
/// inversion: F(x) = 1/2 - (1/pi) int_0^inf Im(exp(-j w x) cf(w)) / w dw.
///
/// [0, trunc] is integrated first, then octaves [T, 2T] are appended until an
/// octave contributes less than `tol` (absolute, in probability). Throws
/// ConvergenceError with the partial value if 64 octaves are not enough.
double cf_to_cdf(const std::function<std::complex<double>(double)>& cf, double x, double trunc,
                 double tol = 1e-6);

}  // namespace icim
