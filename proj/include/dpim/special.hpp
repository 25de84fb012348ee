#pragma once

#include <cmath>

#include <boost/math/special_functions/erf.hpp>

namespace dpim {

inline constexpr double kSqrt2 = 1.41421356237309504880;
inline constexpr double kInvSqrt2Pi = 0.39894228040143267794;

/// Gaussian tail Q(x) = Pr{Z > x}.
inline double q_function(double x) { return 0.5 * std::erfc(x / kSqrt2); }

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / kSqrt2); }

inline double normal_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

/// Inverse of the standard normal CDF, p in (0, 1).
inline double normal_quantile(double p) { return -kSqrt2 * boost::math::erfc_inv(2.0 * p); }

/// x such that Q(x) = p. Accurate for tiny p where 1 - p would round to 1.
inline double normal_upper_quantile(double p) { return kSqrt2 * boost::math::erfc_inv(2.0 * p); }

/// Closed-form erf approximation 1 - e^{-v^2}/6 - e^{-4v^2/3}/2 with odd
/// extension. Raw formula: at v = 0 it returns 1/3, not 0.
inline double erf_fast(double v) {
  const double a = std::fabs(v);
  const double r = 1.0 - std::exp(-a * a) / 6.0 - 0.5 * std::exp(-4.0 * a * a / 3.0);
  return v < 0.0 ? -r : r;
}

/// Below this magnitude the tractable path falls back to the exact erf.
inline constexpr double kErfFastCutoff = 1.0;

/// erfc used by the tractable bounds: the closed-form tail for |v| >= cutoff,
/// std::erfc otherwise. Returned directly as a tail to avoid cancellation.
inline double erfc_tractable(double v) {
  if (v >= kErfFastCutoff) return std::exp(-v * v) / 6.0 + 0.5 * std::exp(-4.0 * v * v / 3.0);
  if (v <= -kErfFastCutoff) return 2.0 - erfc_tractable(-v);
  return std::erfc(v);
}

inline double erf_tractable(double v) { return 1.0 - erfc_tractable(v); }

}  // namespace dpim
