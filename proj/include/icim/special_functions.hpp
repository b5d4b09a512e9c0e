#pragma once

namespace icim {

/// log Gamma(x) for x > 0.
double ln_gamma(double x);

/// Modified Bessel function of the second kind K_v(x), any real order, x > 0.
/// Throws DomainError if the value overflows (x near 0 with |v| large).
double bessel_k(double v, double x);

/// Tricomi confluent hypergeometric U(a, b, z) for a > 0, z > 0, evaluated
/// from its Laplace-type integral. Throws ConvergenceError when the integral
/// does not meet `rel_tol`.
double hypergeometric_u(double a, double b, double z, double rel_tol = 1e-10);

/// Whittaker W_{kappa,mu}(z) for z > 0, through
/// W = exp(-z/2) z^(mu+1/2) U(mu - kappa + 1/2, 1 + 2 mu, z).
/// Requires mu - kappa + 1/2 > 0.
double whittaker_w(double kappa, double mu, double z, double rel_tol = 1e-10);

/// exp(z/2) * W_{kappa,mu}(z); finite for large z where W itself underflows.
double whittaker_w_scaled(double kappa, double mu, double z, double rel_tol = 1e-10);

}  // namespace icim
