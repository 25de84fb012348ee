#pragma once

#include <cmath>
#include <random>
#include <span>
#include <vector>

#include <boost/math/special_functions/bessel.hpp>

#include "dpim/error.hpp"
#include "dpim/random.hpp"

namespace dpim {

/// Electrical SNR in linear units from dB: SNR_dB = 10 log10(gamma).
inline double snr_from_db(double snr_db) { return std::pow(10.0, snr_db / 10.0); }

/// y = h·x + n with n ~ N(0, sigma_n^2). gamma = A^2 / sigma_n^2 for the
/// reference amplitude A.
struct ChannelState {
  double h = 1.0;
  double sigma_n = 1.0;

  static ChannelState from_snr_db(double snr_db, double reference_amplitude = 1.0, double h = 1.0) {
    require(reference_amplitude > 0.0, "reference amplitude must be positive");
    require(h > 0.0, "channel coefficient must be positive");
    return {h, reference_amplitude / std::sqrt(snr_from_db(snr_db))};
  }

  double gamma(double reference_amplitude = 1.0) const {
    return reference_amplitude * reference_amplitude / (sigma_n * sigma_n);
  }
};

/// Gamma-Gamma turbulence: h = X·Y with X ~ Gamma(lambda, 1/lambda),
/// Y ~ Gamma(mu, 1/mu), so E[h] = 1.
struct TurbulenceSpec {
  double lambda = 11.6;
  double mu = 10.1;

  void validate() const { require(lambda > 0.0 && mu > 0.0, "turbulence parameters must be positive"); }

  /// Both parameters infinite: point mass at h = 1.
  bool degenerate() const { return std::isinf(lambda) && std::isinf(mu); }
};

template <class Rng>
void apply_awgn(std::span<const double> x, const ChannelState& state, Rng& rng, std::vector<double>& y) {
  NormalDistribution noise(0.0, state.sigma_n);
  y.resize(x.size());
  if (state.sigma_n == 0.0) {
    for (std::size_t t = 0; t < x.size(); ++t) y[t] = state.h * x[t];
    return;
  }
  for (std::size_t t = 0; t < x.size(); ++t) y[t] = state.h * x[t] + noise(rng);
}

template <class Rng>
std::vector<double> apply_awgn(std::span<const double> x, const ChannelState& state, Rng& rng) {
  std::vector<double> y;
  apply_awgn(x, state, rng, y);
  return y;
}

/// Unit-mean Gamma-Gamma density
///   f(h) = 2(λμ)^((λ+μ)/2) / (Γ(λ)Γ(μ)) · h^((λ+μ)/2 − 1) · K_{λ−μ}(2√(λμh)),
/// evaluated in log space.
inline double gamma_gamma_pdf(double h, const TurbulenceSpec& spec) {
  spec.validate();
  require(h > 0.0, "Gamma-Gamma density is defined for h > 0");
  const double lm = spec.lambda * spec.mu;
  const double arg = 2.0 * std::sqrt(lm * h);
  const double nu = spec.lambda - spec.mu;
  double log_bessel;
  if (arg > 600.0) {
    // Large-argument asymptote K_nu(z) ~ sqrt(pi/2z) e^{-z}.
    log_bessel = 0.5 * std::log(M_PI / (2.0 * arg)) - arg;
  } else {
    const double k = boost::math::cyl_bessel_k(nu, arg);
    if (!(k > 0.0)) return 0.0;
    log_bessel = std::log(k);
  }
  const double log_f = std::log(2.0) + 0.5 * (spec.lambda + spec.mu) * std::log(lm * h) - std::log(h) -
                       std::lgamma(spec.lambda) - std::lgamma(spec.mu) + log_bessel;
  return std::exp(log_f);
}

/// Infinite shape parameters contribute a constant factor of 1.
template <class Rng>
double gamma_gamma_sample(const TurbulenceSpec& spec, Rng& rng) {
  auto factor = [&](double shape) {
    if (std::isinf(shape)) return 1.0;
    return std::gamma_distribution<double>(shape, 1.0 / shape)(rng);
  };
  const double x = factor(spec.lambda);
  return x * factor(spec.mu);
}

}  // namespace dpim
