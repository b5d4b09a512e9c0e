#pragma once

#include <complex>
#include <random>
#include <string>
#include <utility>
#include <variant>

namespace icim {

/// Exponential power gain (Rayleigh envelope) with the given rate.
struct Exponential {
  double rate = 1.0;
};

/// Gamma power gain; `shape` is m_s and `scale` is m_c.
struct Gamma {
  double shape = 1.0;
  double scale = 1.0;
};

/// Product of Gamma(m_c, 1/m_c) fading and Gamma(m_s, omega/m_s) shadowing.
/// `b` = 2 sqrt(m_c m_s / omega) is kept alongside the shapes.
struct GeneralizedK {
  double m_c = 1.0;
  double m_s = 1.0;
  double omega = 1.0;
  double b = 2.0;
};

using ChannelModel = std::variant<Exponential, Gamma, GeneralizedK>;

/// Validated constructors; throw InvalidArgument on non-positive parameters.
ChannelModel make_exponential(double rate);
ChannelModel make_gamma(double shape, double scale);
ChannelModel make_generalized_k(double m_c, double m_s, double omega);

/// Short human-readable description, e.g. "gamma(1.5,0.666667)".
std::string describe(const ChannelModel& model);

double pdf(const ChannelModel& model, double x);
double cdf(const ChannelModel& model, double x);
/// 1 - cdf, computed without cancellation in the upper tail.
double survival(const ChannelModel& model, double x);
/// log cdf, accurate both in the lower tail and close to 1.
double log_cdf(const ChannelModel& model, double x);
double mean(const ChannelModel& model);
/// [lo, hi] with P(X < lo) and P(X > hi) both at most `tail`, found by halving
/// and doubling from the mean.
std::pair<double, double> support_range(const ChannelModel& model, double tail = 1e-15);
double variance(const ChannelModel& model);

/// Leftmost real part for which E[exp(-sX)] converges (the strip is open for
/// the closed forms, closed at 0 for Generalized-K).
double laplace_abscissa(const ChannelModel& model);

/// E[exp(-sX)]. Generalized-K uses the Whittaker form on the positive real
/// axis and a Gamma-mixture integral elsewhere. Throws DomainError outside the
/// convergence strip.
std::complex<double> laplace(const ChannelModel& model, std::complex<double> s);

/// 1 - E[exp(-sX)], accurate when s is small.
std::complex<double> laplace_complement(const ChannelModel& model, std::complex<double> s);

/// Moment-matched Gamma approximation of a Generalized-K law.
Gamma gamma_from_gk(const GeneralizedK& gk);

template <typename Rng>
double sample(const ChannelModel& model, Rng& rng) {
  struct Visitor {
    Rng& rng;
    double operator()(const Exponential& e) const {
      return std::exponential_distribution<double>(e.rate)(rng);
    }
    double operator()(const Gamma& g) const {
      return std::gamma_distribution<double>(g.shape, g.scale)(rng);
    }
    double operator()(const GeneralizedK& k) const {
      const double fading = std::gamma_distribution<double>(k.m_c, 1.0 / k.m_c)(rng);
      const double shadow = std::gamma_distribution<double>(k.m_s, k.omega / k.m_s)(rng);
      return fading * shadow;
    }
  };
  return std::visit(Visitor{rng}, model);
}

}  // namespace icim
