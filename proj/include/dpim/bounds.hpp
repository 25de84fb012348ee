#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string_view>
#include <vector>

#include "dpim/channel.hpp"
#include "dpim/error.hpp"
#include "dpim/order_stats.hpp"
#include "dpim/quadrature.hpp"
#include "dpim/signal.hpp"
#include "dpim/special.hpp"

namespace dpim {

inline constexpr double kDefaultAlpha = 0.82;

/// Parameters shared by the four packet-level BER bounds.
struct BoundInput {
  ModulationSpec spec{};
  int symbols = 100;          // N_s
  int chips = 0;              // L; 0 means round(N_s * L_s)
  double amplitude = 1.0;     // A (DPIM pulse height, BDPIM average)
  BarrierSpec barrier{};      // used by the BDPIM bounds only
  double h = 1.0;
  double sigma_n = 1.0;
  double alpha = kDefaultAlpha;

  static BoundInput at_snr(const ModulationSpec& spec, int symbols, double snr_db, double h = 1.0,
                           double amplitude = 1.0) {
    BoundInput in;
    in.spec = spec;
    in.symbols = symbols;
    in.amplitude = amplitude;
    in.h = h;
    in.sigma_n = ChannelState::from_snr_db(snr_db, amplitude).sigma_n;
    return in;
  }

  BoundInput with_barrier(const BarrierSpec& b) const {
    BoundInput in = *this;
    in.barrier = b;
    in.amplitude = b.average;
    return in;
  }

  BoundInput with_h(double value) const {
    BoundInput in = *this;
    in.h = value;
    return in;
  }

  int chip_length() const {
    return chips > 0 ? chips : static_cast<int>(std::llround(symbols * spec.avg_symbol_duration()));
  }
  double gamma() const { return amplitude * amplitude / (sigma_n * sigma_n); }
  double sigma() const { return sigma_n / h; }
  int barriers() const { return symbols / barrier.period; }
  /// ⌊K·L_s⌉ − K: empty chips in one barrier segment, rounded half away from zero.
  int segment_zeros() const {
    return static_cast<int>(std::llround(barrier.period * spec.avg_symbol_duration())) - barrier.period;
  }

  void validate() const {
    require(symbols >= 1, "N_s must be >= 1");
    require(amplitude > 0.0, "amplitude must be positive");
    require(h > 0.0, "channel coefficient must be positive");
    require(sigma_n > 0.0, "noise level must be positive");
    require(alpha > 0.0 && alpha <= 1.0, "alpha must lie in (0, 1]");
    require(chip_length() > symbols, "chip length must exceed N_s");
  }

  void validate_barrier() const {
    validate();
    barrier.validate();
    require(symbols % barrier.period == 0, "N_s must be a multiple of the barrier period K");
    require(segment_zeros() >= 1, "barrier segment must contain empty chips");
  }
};

/// ((L_s−1)/L_s)·Q(h√γ/2 + ln(L_s−1)/(h√γ)) + (1/L_s)·Q(h√γ/2 − ln(L_s−1)/(h√γ))
inline double chip_error_prob_dpim(double gamma, double h, double avg_symbol_chips) {
  require(avg_symbol_chips > 1.0, "average symbol duration must exceed one chip");
  if (std::isinf(gamma)) return 0.0;
  const double s = h * std::sqrt(gamma);
  const double shift = std::log(avg_symbol_chips - 1.0) / s;
  return (avg_symbol_chips - 1.0) / avg_symbol_chips * q_function(s / 2.0 + shift) +
         q_function(s / 2.0 - shift) / avg_symbol_chips;
}

/// Per-pulse error probability of the barrier threshold test.
inline double barrier_chip_error_prob(const BarrierSpec& barrier, double h, double sigma_n) {
  require(barrier.high > barrier.low, "barrier detection needs A_H > A_L");
  if (sigma_n == 0.0) return 0.0;
  const int k = barrier.period;
  const double d = h * (barrier.high - barrier.low);
  const double shift = sigma_n * std::log(k - 1.0) / d;
  // A barrier (prior 1/K) errs below the threshold, a low pulse (prior (K−1)/K) above it.
  return q_function(d / (2.0 * sigma_n) - shift) / k + (k - 1.0) / k * q_function(d / (2.0 * sigma_n) + shift);
}

namespace detail {

// 1 − x^n for x in [0, 1], without cancellation.
inline double one_minus_pow(double log_x, double n) { return -std::expm1(n * log_x); }

// log F from the (F, 1 − F) pair, choosing the accurate branch.
inline double log_cdf(CdfPair p) { return p.cdf < 0.5 ? std::log(p.cdf) : std::log1p(-p.sf); }

// Closed-form CDF pair of N(mean, sigma^2) for the tractable bounds.
inline CdfPair tractable_cdf_pair(double v, double mean, double sigma) {
  const double tail = 0.5 * erfc_tractable((v - mean) / (kSqrt2 * sigma));
  return {1.0 - tail, tail};
}

// (2 − 2(1−p)^n − n·p(1−p)^{n−1}) / 4
inline double otd_packet_term(double p, int n) {
  if (p <= 0.0) return 0.0;
  if (p >= 1.0) return n == 1 ? 0.25 : 0.5;
  const double l = std::log1p(-p);
  return (2.0 * one_minus_pow(l, n) - n * p * std::exp((n - 1) * l)) / 4.0;
}

struct OrPair {
  double first = 0.0;   // single-pair probability driver
  double second = 0.0;  // at least two pairs
  double error = 0.0;
};

// OR(mu1, 1, n1; mu2, n2, n2) and OR(mu1, 2, n1; mu2, n2 − 1, n2).
inline OrPair or_pair_exact(double mu1, int n1, double mu2, int n2, double sigma) {
  OrPair out;
  const auto one = or_exact({mu1, 1, n1, mu2, n2, n2, sigma});
  out.first = one.value;
  out.error = one.quadrature_error;
  if (n1 >= 2 && n2 >= 2) {
    const auto two = or_exact({mu1, 2, n1, mu2, n2 - 1, n2, sigma});
    out.second = two.value;
    out.error += two.quadrature_error;
  }
  return out;
}

// (first + 2·second) / 6
inline double osd_packet_term(const OrPair& p) { return (p.first + 2.0 * p.second) / 6.0; }

inline BoundResult finish(double value, BoundMode mode, double error) {
  auto r = clamp_probability({value, mode, error});
  r.value = std::min(r.value, 0.5);
  return r;
}

}  // namespace detail

/// Packet-level BER bound for DPIM with threshold detection.
inline BoundResult ber_bound_dpim_otd(const BoundInput& in) {
  in.validate();
  const double pc = chip_error_prob_dpim(in.gamma(), in.h, in.spec.avg_symbol_duration());
  return detail::finish(detail::otd_packet_term(pc, in.chip_length()), BoundMode::exact, 0.0);
}

/// Packet-level BER bound for DPIM with sorting detection.
inline BoundResult ber_bound_dpim_osd(const BoundInput& in, BoundMode mode) {
  in.validate();
  const int empty = in.chip_length() - in.symbols;
  if (mode == BoundMode::exact) {
    const auto p = detail::or_pair_exact(0.0, empty, in.amplitude, in.symbols, in.sigma());
    return detail::finish(detail::osd_packet_term(p), mode, p.error);
  }
  const double v1 = in.alpha * extreme_order_stat_mean(in.symbols, in.amplitude, in.sigma_n, in.h);
  const auto f = detail::tractable_cdf_pair(v1, 0.0, in.sigma());
  const double lf = detail::log_cdf(f);
  const double value =
      0.5 * detail::one_minus_pow(lf, empty) - empty * std::exp((empty - 1) * lf) * f.sf / 3.0;
  return detail::finish(value, mode, 0.0);
}

/// Sub-event probabilities of the two-phase sorting detector.
struct BarrierEvents {
  detail::OrPair barrier;  // phase 1: A_H among A_L pulses
  detail::OrPair segment;  // phase 2: A_L among empty chips of one segment
};

inline BarrierEvents barrier_events_exact(const BoundInput& in) {
  in.validate_barrier();
  const auto& b = in.barrier;
  const int q = in.barriers();
  return {detail::or_pair_exact(b.low, in.symbols - q, b.high, q, in.sigma()),
          detail::or_pair_exact(0.0, in.segment_zeros(), b.low, b.period - 1, in.sigma())};
}

/// Packet-level BER bound for BDPIM with two-phase sorting detection.
inline BoundResult ber_bound_bdpim_osd(const BoundInput& in, BoundMode mode) {
  in.validate_barrier();
  const auto& b = in.barrier;
  const int q = in.barriers();
  const int lows = in.symbols - q;
  const int zeros = in.segment_zeros();
  if (mode == BoundMode::exact) {
    const auto e = barrier_events_exact(in);
    const double p_lh = e.barrier.first, p_0l = e.segment.first;
    const double value = detail::osd_packet_term(e.barrier) * (1.0 - p_0l) +
                         detail::osd_packet_term(e.segment) * (1.0 - p_lh) + 0.5 * p_lh * p_0l;
    return detail::finish(value, mode, e.barrier.error + e.segment.error);
  }
  const double v3 = in.alpha * extreme_order_stat_mean(q, b.high, in.sigma_n, in.h);
  const double v4 = in.alpha * extreme_order_stat_mean(b.period - 1, b.low, in.sigma_n, in.h);
  const auto f3 = detail::tractable_cdf_pair(v3, b.low, in.sigma());
  const auto f4 = detail::tractable_cdf_pair(v4, 0.0, in.sigma());
  const double l3 = detail::log_cdf(f3), l4 = detail::log_cdf(f4);
  const double value = 0.5 * -std::expm1(lows * l3 + zeros * l4) -
                       lows * std::exp((lows - 1) * l3 + zeros * l4) * f3.sf / 3.0 -
                       zeros * std::exp((zeros - 1) * l4 + lows * l3) * f4.sf / 3.0;
  return detail::finish(value, mode, 0.0);
}

/// Packet-level BER bound for BDPIM with streaming threshold/sorting detection.
inline BoundResult ber_bound_bdpim_otd_osd(const BoundInput& in, BoundMode mode) {
  in.validate_barrier();
  const int n = in.symbols;
  const int zeros = in.segment_zeros();
  const double pc = barrier_chip_error_prob(in.barrier, in.h, in.sigma_n);
  const double l_ok = std::log1p(-std::min(pc, 1.0 - 1e-300));
  const double p_ok = std::exp(n * l_ok);                         // (1 − P_c')^{N_s}
  const double single = n * pc * std::exp((n - 1) * l_ok);       // N_s P_c' (1 − P_c')^{N_s−1}
  const double barrier_fail = detail::one_minus_pow(l_ok, n);
  if (mode == BoundMode::exact) {
    const auto seg = detail::or_pair_exact(0.0, zeros, in.barrier.low, in.barrier.period - 1, in.sigma());
    const double value = (2.0 * barrier_fail - single) / 4.0 * (1.0 - seg.first) +
                         detail::osd_packet_term(seg) * p_ok + 0.5 * barrier_fail * seg.first;
    return detail::finish(value, mode, seg.error);
  }
  const double v4 = in.alpha * extreme_order_stat_mean(in.barrier.period - 1, in.barrier.low, in.sigma_n, in.h);
  const auto f4 = detail::tractable_cdf_pair(v4, 0.0, in.sigma());
  const double l4 = detail::log_cdf(f4);
  const double f4n = std::exp(zeros * l4);
  const double value = 0.5 * -std::expm1(n * l_ok + zeros * l4) - 0.25 * single * f4n -
                       zeros * std::exp((zeros - 1) * l4) * f4.sf * p_ok / 3.0;
  return detail::finish(value, mode, 0.0);
}

/// Which packet-level bound applies to a scheme/detector pair.
enum class BoundKind { dpim_otd, dpim_osd, bdpim_osd, bdpim_otd_osd };

inline std::string_view to_string(BoundKind k) {
  switch (k) {
    case BoundKind::dpim_otd: return "dpim-otd";
    case BoundKind::dpim_osd: return "dpim-osd";
    case BoundKind::bdpim_osd: return "bdpim-osd";
    case BoundKind::bdpim_otd_osd: return "bdpim-otd-osd";
  }
  return "?";
}

/// Threshold detection has a single closed form; there is no separate
/// tractable mode, so that request yields nullopt.
inline std::optional<BoundResult> evaluate_bound(BoundKind kind, const BoundInput& in, BoundMode mode) {
  switch (kind) {
    case BoundKind::dpim_otd:
      if (mode == BoundMode::tractable) return std::nullopt;
      return ber_bound_dpim_otd(in);
    case BoundKind::dpim_osd: return ber_bound_dpim_osd(in, mode);
    case BoundKind::bdpim_osd: return ber_bound_bdpim_osd(in, mode);
    case BoundKind::bdpim_otd_osd: return ber_bound_bdpim_otd_osd(in, mode);
  }
  return std::nullopt;
}

inline constexpr double kErgodicRelTolerance = 1e-6;

namespace detail {

// Support of the Gamma-Gamma density in t = ln h, trimmed where h·f(h)
// falls below 1e-16 of its peak.
inline std::pair<double, double> gamma_gamma_log_support(const TurbulenceSpec& spec) {
  constexpr double lo = -16.0, hi = 6.0, step = 0.02;
  std::vector<double> g;
  double peak = 0.0;
  for (double t = lo; t <= hi; t += step) {
    const double h = std::exp(t);
    const double v = gamma_gamma_pdf(h, spec) * h;
    g.push_back(v);
    peak = std::max(peak, v);
  }
  require(peak > 0.0, "Gamma-Gamma density vanished on the search grid");
  std::size_t first = 0, last = g.size() - 1;
  while (first < g.size() && g[first] < 1e-16 * peak) ++first;
  while (last > first && g[last] < 1e-16 * peak) --last;
  const double a = lo + step * static_cast<double>(first > 0 ? first - 1 : 0);
  const double b = lo + step * static_cast<double>(std::min(last + 1, g.size() - 1));
  return {a, b};
}

}  // namespace detail

/// ∫₀^∞ bound(h)·f(h) dh over the Gamma-Gamma density, integrated in ln h.
template <class BoundFn>
BoundResult ergodic_bound(BoundFn&& bound_fn, const TurbulenceSpec& turbulence) {
  turbulence.validate();
  if (turbulence.degenerate()) return clamp_probability({bound_fn(1.0), BoundMode::exact, 0.0});
  const auto [a, b] = detail::gamma_gamma_log_support(turbulence);
  auto integrand = [&](double t) {
    const double h = std::exp(t);
    const double density = gamma_gamma_pdf(h, turbulence) * h;
    return density == 0.0 ? 0.0 : bound_fn(h) * density;
  };
  const auto r = integrate_adaptive(integrand, a, b, 1e-300, kErgodicRelTolerance, 12);
  if (!r.converged) throw NumericalError("ergodic bound quadrature did not converge");
  return clamp_probability({r.value, BoundMode::exact, r.abs_error});
}

}  // namespace dpim
