#include "icim/special_functions.hpp"

#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "icim/error.hpp"
#include "icim/quadrature.hpp"

namespace icim {

double ln_gamma(double x) {
  if (!(x > 0.0) || !std::isfinite(x)) throw InvalidArgument("ln_gamma: x must be positive");
  return boost::math::lgamma(x);
}

double bessel_k(double v, double x) {
  if (!(x > 0.0)) throw InvalidArgument("bessel_k: x must be positive");
  double value = 0.0;
  try {
    value = std::cyl_bessel_k(std::abs(v), x);
  } catch (const std::exception& e) {
    throw DomainError(std::string("bessel_k: ") + e.what());
  }
  if (!std::isfinite(value)) {
    std::ostringstream os;
    os << "bessel_k: K_" << v << "(" << x << ") overflows";
    throw DomainError(os.str());
  }
  return value;
}

double hypergeometric_u(double a, double b, double z, double rel_tol) {
  if (!(a > 0.0)) throw InvalidArgument("hypergeometric_u: a must be positive");
  if (!(z > 0.0)) throw InvalidArgument("hypergeometric_u: z must be positive");
  // U = 1/Gamma(a) int_0^inf exp(-z t) t^(a-1) (1+t)^(b-a-1) dt, taken over
  // u = log t where the integrand is smooth with light tails on both sides.
  const double power = b - a - 1.0;
  auto log_integrand = [=](double u) {
    const double t = std::exp(u);
    return a * u - z * t + power * std::log1p(t);
  };
  const double peak = std::log(a / z);
  const double offset = log_integrand(peak);
  const double lo = std::min(peak, 0.0) - 50.0 / a;
  const double hi = std::max(peak, 0.0) + std::log((60.0 + std::abs(power) * 10.0) / z + 1.0);
  auto integrand = [&](double u) { return std::exp(log_integrand(u) - offset); };
  IntegrationOptions options;
  double integral = 0.0;
  try {
    integral = integrate_interval(integrand, lo, peak, rel_tol, options) +
               integrate_interval(integrand, peak, hi, rel_tol, options);
  } catch (const ConvergenceError& e) {
    throw ConvergenceError(std::string("hypergeometric_u: ") + e.what(),
                           e.partial_estimate() * std::exp(offset - ln_gamma(a)));
  }
  return integral * std::exp(offset - ln_gamma(a));
}

double whittaker_w_scaled(double kappa, double mu, double z, double rel_tol) {
  if (!(z > 0.0)) throw InvalidArgument("whittaker_w: z must be positive");
  const double a = mu - kappa + 0.5;
  if (!(a > 0.0)) throw InvalidArgument("whittaker_w: requires mu - kappa + 1/2 > 0");
  return std::pow(z, mu + 0.5) * hypergeometric_u(a, 1.0 + 2.0 * mu, z, rel_tol);
}

double whittaker_w(double kappa, double mu, double z, double rel_tol) {
  return std::exp(-0.5 * z) * whittaker_w_scaled(kappa, mu, z, rel_tol);
}

}  // namespace icim
