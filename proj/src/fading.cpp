#include "icim/fading.hpp"

#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <limits>
#include <sstream>

#include "icim/error.hpp"
#include "icim/quadrature.hpp"
#include "icim/special_functions.hpp"

namespace icim {

namespace {

using cplx = std::complex<double>;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require_positive(double value, const char* name) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw InvalidArgument(std::string(name) + " must be positive and finite");
  }
}

// log(1 + z) without cancellation for small |z|.
cplx log1p(cplx z) {
  const cplx w = 1.0 + z;
  if (w == 1.0) return z;
  return std::log(w) * z / (w - 1.0);
}

// exp(w) - 1 without cancellation for small |w|.
cplx expm1(cplx w) {
  const double half_sin = std::sin(0.5 * w.imag());
  return {std::expm1(w.real()) * std::cos(w.imag()) - 2.0 * half_sin * half_sin,
          std::exp(w.real()) * std::sin(w.imag())};
}

void check_strip(const ChannelModel& model, cplx s) {
  const double abscissa = laplace_abscissa(model);
  const bool closed = std::holds_alternative<GeneralizedK>(model);
  const bool inside = closed ? s.real() >= abscissa : s.real() > abscissa;
  if (!inside) {
    std::ostringstream os;
    os << "laplace: Re(s) = " << s.real() << " is outside the convergence strip of " << describe(model);
    throw DomainError(os.str());
  }
}

// E[f(G2)] for the Gamma(m_s, omega/m_s) shadowing term, integrated over
// u = log G2 where the weight is smooth and both tails are light.
template <typename F>
auto shadow_average(const GeneralizedK& k, F&& f) {
  const double theta = k.omega / k.m_s;
  const double log_norm = -ln_gamma(k.m_s);
  auto integrand = [&](double u) {
    const double ratio = std::exp(u) / theta;
    return f(std::exp(u)) * std::exp(k.m_s * std::log(ratio) - ratio + log_norm);
  };
  const double peak = std::log(k.omega);
  const double lo = std::log(theta) - 40.0 / k.m_s;
  const double hi = std::log(theta * (k.m_s + 60.0 + 6.0 * std::sqrt(k.m_s)));
  IntegrationOptions options;
  options.abs_tol = 1e-15;
  return integrate_interval(integrand, lo, peak, 1e-10, options) +
         integrate_interval(integrand, peak, hi, 1e-10, options);
}

// E over the shadowing of (1 + s G2 / m_c)^(-m_c), or of its complement.
cplx gk_mixture(const GeneralizedK& k, cplx s, bool complement) {
  return shadow_average(k, [&](double g2) {
    const cplx w = -k.m_c * log1p(s * g2 / k.m_c);
    return complement ? -expm1(w) : std::exp(w);
  });
}

cplx gk_whittaker(const GeneralizedK& k, double s) {
  const double z = k.b * k.b / (4.0 * s);
  const double kappa = 0.5 * (1.0 - k.m_c - k.m_s);
  const double mu = 0.5 * (k.m_c - k.m_s);
  return std::pow(z, 0.5 * (k.m_s + k.m_c - 1.0)) * whittaker_w_scaled(kappa, mu, z, 1e-10);
}

}  // namespace

ChannelModel make_exponential(double rate) {
  require_positive(rate, "exponential rate");
  return Exponential{rate};
}

ChannelModel make_gamma(double shape, double scale) {
  require_positive(shape, "gamma shape");
  require_positive(scale, "gamma scale");
  return Gamma{shape, scale};
}

ChannelModel make_generalized_k(double m_c, double m_s, double omega) {
  require_positive(m_c, "m_c");
  require_positive(m_s, "m_s");
  require_positive(omega, "omega");
  return GeneralizedK{m_c, m_s, omega, 2.0 * std::sqrt(m_c * m_s / omega)};
}

std::string describe(const ChannelModel& model) {
  std::ostringstream os;
  std::visit(Overloaded{
                 [&](const Exponential& e) { os << "exponential(" << e.rate << ")"; },
                 [&](const Gamma& g) { os << "gamma(" << g.shape << "," << g.scale << ")"; },
                 [&](const GeneralizedK& k) {
                   os << "generalized_k(" << k.m_c << "," << k.m_s << "," << k.omega << ")";
                 },
             },
             model);
  return os.str();
}

double pdf(const ChannelModel& model, double x) {
  if (!(x > 0.0)) throw InvalidArgument("pdf: x must be positive");
  return std::visit(
      Overloaded{
          [&](const Exponential& e) { return e.rate * std::exp(-e.rate * x); },
          [&](const Gamma& g) { return boost::math::gamma_p_derivative(g.shape, x / g.scale) / g.scale; },
          [&](const GeneralizedK& k) {
            const double bessel = bessel_k(k.m_c - k.m_s, k.b * std::sqrt(x));
            if (bessel == 0.0) return 0.0;
            const double log_f = std::log(2.0) - ln_gamma(k.m_c) - ln_gamma(k.m_s) +
                                 (k.m_c + k.m_s) * std::log(0.5 * k.b) +
                                 (0.5 * (k.m_c + k.m_s) - 1.0) * std::log(x) + std::log(bessel);
            return std::exp(log_f);
          },
      },
      model);
}

double cdf(const ChannelModel& model, double x) {
  if (!(x > 0.0)) return 0.0;
  if (std::isinf(x)) return 1.0;
  return std::visit(Overloaded{
                        [&](const Exponential& e) { return -std::expm1(-e.rate * x); },
                        [&](const Gamma& g) { return boost::math::gamma_p(g.shape, x / g.scale); },
                        [&](const GeneralizedK&) { return 1.0 - survival(model, x); },
                    },
                    model);
}

double survival(const ChannelModel& model, double x) {
  if (!(x > 0.0)) return 1.0;
  if (std::isinf(x)) return 0.0;
  return std::visit(
      Overloaded{
          [&](const Exponential& e) { return std::exp(-e.rate * x); },
          [&](const Gamma& g) { return boost::math::gamma_q(g.shape, x / g.scale); },
          [&](const GeneralizedK& k) {
            return shadow_average(k, [&](double g2) { return boost::math::gamma_q(k.m_c, k.m_c * x / g2); });
          },
      },
      model);
}

double log_cdf(const ChannelModel& model, double x) {
  if (!(x > 0.0)) return -std::numeric_limits<double>::infinity();
  const double tail = survival(model, x);
  if (tail < 0.5) return std::log1p(-tail);
  if (std::holds_alternative<GeneralizedK>(model)) {
    const GeneralizedK& k = std::get<GeneralizedK>(model);
    return std::log(shadow_average(k, [&](double g2) { return boost::math::gamma_p(k.m_c, k.m_c * x / g2); }));
  }
  return std::log(cdf(model, x));
}

std::pair<double, double> support_range(const ChannelModel& model, double tail) {
  const double m = mean(model);
  double lo = m;
  while (cdf(model, lo) > tail && lo > 1e-300) lo *= 0.5;
  double hi = m;
  while (survival(model, hi) > tail) hi *= 2.0;
  return {lo, hi};
}

double mean(const ChannelModel& model) {
  return std::visit(Overloaded{
                        [](const Exponential& e) { return 1.0 / e.rate; },
                        [](const Gamma& g) { return g.shape * g.scale; },
                        [](const GeneralizedK& k) { return k.omega; },
                    },
                    model);
}

double variance(const ChannelModel& model) {
  return std::visit(Overloaded{
                        [](const Exponential& e) { return 1.0 / (e.rate * e.rate); },
                        [](const Gamma& g) { return g.shape * g.scale * g.scale; },
                        [](const GeneralizedK& k) {
                          return k.omega * k.omega *
                                 ((1.0 + 1.0 / k.m_c) * (1.0 + 1.0 / k.m_s) - 1.0);
                        },
                    },
                    model);
}

double laplace_abscissa(const ChannelModel& model) {
  return std::visit(Overloaded{
                        [](const Exponential& e) { return -e.rate; },
                        [](const Gamma& g) { return -1.0 / g.scale; },
                        [](const GeneralizedK&) { return 0.0; },
                    },
                    model);
}

std::complex<double> laplace(const ChannelModel& model, std::complex<double> s) {
  check_strip(model, s);
  if (s == 0.0) return 1.0;
  return std::visit(Overloaded{
                        [&](const Exponential& e) -> cplx { return e.rate / (e.rate + s); },
                        [&](const Gamma& g) -> cplx {
                          return std::exp(-g.shape * log1p(g.scale * s));
                        },
                        [&](const GeneralizedK& k) -> cplx {
                          if (s.imag() == 0.0) {
                            try {
                              return gk_whittaker(k, s.real());
                            } catch (const ConvergenceError&) {
                            }
                          }
                          return gk_mixture(k, s, false);
                        },
                    },
                    model);
}

std::complex<double> laplace_complement(const ChannelModel& model, std::complex<double> s) {
  check_strip(model, s);
  if (s == 0.0) return 0.0;
  return std::visit(Overloaded{
                        [&](const Exponential& e) -> cplx { return s / (e.rate + s); },
                        [&](const Gamma& g) -> cplx {
                          return -expm1(-g.shape * log1p(g.scale * s));
                        },
                        [&](const GeneralizedK& k) -> cplx { return gk_mixture(k, s, true); },
                    },
                    model);
}

Gamma gamma_from_gk(const GeneralizedK& gk) {
  const double shape = 1.0 / ((1.0 + 1.0 / gk.m_c) * (1.0 + 1.0 / gk.m_s) - 1.0);
  return Gamma{shape, gk.omega / shape};
}

}  // namespace icim
