#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include "dpim/error.hpp"
#include "dpim/signal.hpp"

namespace dpim {

/// Per-phase diagnostics raised by the BDPIM detectors.
struct PhaseFlags {
  bool short_segment = false;      // a segment had fewer than K-1 chips
  bool barrier_recovered = false;  // buffered segment re-split (missed or spurious barrier)
  bool no_barrier = false;         // streaming detector saw no barrier crossing
  bool trailing_segment = false;   // barriers still owed at end of frame
  bool any() const { return short_segment || barrier_recovered || no_barrier || trailing_segment; }
};

struct DetectionResult {
  std::vector<double> chips;         // hard-decision amplitudes
  std::vector<std::size_t> support;  // pulse positions, ascending
  PhaseFlags flags;
  std::vector<std::size_t> segment_lengths;  // streaming detector buffer sizes at each flush
};

/// Absolute decision threshold h·A_T.
struct ThresholdSpec {
  double threshold = 0.5;
  double amplitude = 1.0;  // value written for detected pulses
};

namespace detail {

inline void finish_support(DetectionResult& r) {
  r.support.clear();
  for (std::size_t t = 0; t < r.chips.size(); ++t)
    if (r.chips[t] != 0.0) r.support.push_back(t);
}

// Indices of the `count` largest entries of y[first, last), ties to the lower index.
inline std::vector<std::size_t> largest_indices(std::span<const double> y, std::size_t first, std::size_t last,
                                                std::size_t count) {
  std::vector<std::size_t> idx(last - first);
  std::iota(idx.begin(), idx.end(), first);
  count = std::min(count, idx.size());
  auto before = [&](std::size_t a, std::size_t b) { return y[a] > y[b] || (y[a] == y[b] && a < b); };
  if (count < idx.size()) std::nth_element(idx.begin(), idx.begin() + count, idx.end(), before);
  idx.resize(count);
  return idx;
}

}  // namespace detail

/// Normalized OTD threshold A_T = A/2 + A/(h^2 γ)·ln(L_s − 1), using the
/// expected pulse density 1/L_s in place of the packet-specific priors.
inline double otd_threshold(double amplitude, double h, double gamma, double avg_symbol_chips) {
  require(avg_symbol_chips > 1.0, "OTD threshold needs L_s > 1");
  require(gamma > 0.0 && h > 0.0, "OTD threshold needs gamma > 0 and h > 0");
  return amplitude / 2.0 + amplitude / (h * h * gamma) * std::log(avg_symbol_chips - 1.0);
}

/// Sample-by-sample threshold detection: pulse iff y[t] > threshold.
inline DetectionResult otd_detect(std::span<const double> y, const ThresholdSpec& spec) {
  require(spec.threshold > 0.0, "OTD threshold must be positive");
  DetectionResult r;
  r.chips.resize(y.size());
  for (std::size_t t = 0; t < y.size(); ++t) r.chips[t] = y[t] > spec.threshold ? spec.amplitude : 0.0;
  detail::finish_support(r);
  return r;
}

/// Ordered sequence detection: the N_s largest samples are pulses. Needs no
/// channel knowledge.
inline DetectionResult osd_detect(std::span<const double> y, std::size_t pulses, double amplitude) {
  require(pulses <= y.size(), "OSD needs N_s <= L");
  DetectionResult r;
  r.chips.assign(y.size(), 0.0);
  for (auto t : detail::largest_indices(y, 0, y.size(), pulses)) r.chips[t] = amplitude;
  detail::finish_support(r);
  return r;
}

/// Greedy residual pursuit over the identity dictionary. Each iteration picks
/// the largest residual correlation among unselected atoms and removes it
/// from the residual. The signed correlation is used because the transmitted
/// amplitudes are non-negative.
inline DetectionResult omp_detect(std::span<const double> y, std::size_t pulses, double amplitude) {
  require(pulses <= y.size(), "OMP needs N_s <= L");
  std::vector<double> residual(y.begin(), y.end());
  std::vector<bool> selected(y.size(), false);
  DetectionResult r;
  r.chips.assign(y.size(), 0.0);
  for (std::size_t k = 0; k < pulses; ++k) {
    std::size_t best = y.size();
    for (std::size_t t = 0; t < y.size(); ++t) {
      if (selected[t]) continue;
      if (best == y.size() || residual[t] > residual[best]) best = t;
    }
    selected[best] = true;
    residual[best] -= residual[best];  // r_{k+1} = r_k − <r_k, e_t> e_t
    r.chips[best] = amplitude;
  }
  detail::finish_support(r);
  return r;
}

inline constexpr double kDefaultEnumerationCap = 1e7;

inline double binomial_count(std::size_t n, std::size_t k) {
  if (k > n) return 0.0;
  k = std::min(k, n - k);
  double c = 1.0;
  for (std::size_t i = 1; i <= k; ++i) c = c * static_cast<double>(n - k + i) / static_cast<double>(i);
  return std::round(c);
}

/// Exhaustive MLSD over all x with exactly N_s entries equal to A:
/// argmin ||y − h x||^2. Candidates are visited in lexicographic order and
/// only a strictly smaller metric replaces the incumbent.
inline DetectionResult mlsd_exhaustive(std::span<const double> y, double h, std::size_t pulses, double amplitude,
                                       double enumeration_cap = kDefaultEnumerationCap) {
  const std::size_t n = y.size();
  require(pulses <= n, "MLSD needs N_s <= L");
  if (binomial_count(n, pulses) > enumeration_cap)
    throw NumericalError("MLSD enumeration cap exceeded: C(L, N_s) too large");
  std::vector<std::size_t> comb(pulses);
  std::iota(comb.begin(), comb.end(), 0);
  std::vector<std::size_t> best = comb;
  double best_metric = std::numeric_limits<double>::infinity();
  std::vector<double> x(n);
  const double hx = h * amplitude;
  while (true) {
    std::fill(x.begin(), x.end(), 0.0);
    for (auto t : comb) x[t] = hx;
    double metric = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
      const double d = y[t] - x[t];
      metric += d * d;
    }
    if (metric < best_metric) {
      best_metric = metric;
      best = comb;
    }
    // next combination in lexicographic order
    std::size_t i = pulses;
    while (i > 0 && comb[i - 1] == n - pulses + i - 1) --i;
    if (i == 0) break;
    ++comb[i - 1];
    for (std::size_t j = i; j < pulses; ++j) comb[j] = comb[j - 1] + 1;
  }
  DetectionResult r;
  r.chips.assign(n, 0.0);
  for (auto t : best) r.chips[t] = amplitude;
  detail::finish_support(r);
  return r;
}

namespace detail {

// Two-phase ordered detection on y[first, last) with `barriers` barrier
// pulses: phase 1 marks the largest samples as A_H, phase 2 marks the K−1
// largest in the span before each barrier as A_L. Chips after the final
// barrier are left empty (they are that symbol's interval) unless
// `closed` says `last` is itself a barrier position.
inline void two_phase_osd(std::span<const double> y, std::size_t first, std::size_t last, std::size_t barriers,
                          const BarrierSpec& barrier, std::vector<double>& chips, PhaseFlags& flags,
                          bool closed = false) {
  auto marks = largest_indices(y, first, last, barriers);
  std::sort(marks.begin(), marks.end());
  if (closed) marks.push_back(last);
  const auto per_segment = static_cast<std::size_t>(barrier.period - 1);
  std::size_t start = first;
  for (auto b : marks) {
    if (b < last) chips[b] = barrier.high;
    if (b - start < per_segment) flags.short_segment = true;
    for (auto t : largest_indices(y, start, b, per_segment)) chips[t] = barrier.low;
    start = b + 1;
  }
}

}  // namespace detail

/// BDPIM two-phase OSD: the Q = N_s/K largest samples are barriers (A_H);
/// within each inter-barrier segment the K−1 largest are A_L.
inline DetectionResult bdpim_osd_detect(std::span<const double> y, std::size_t symbols, const BarrierSpec& barrier) {
  barrier.validate();
  require(symbols % static_cast<std::size_t>(barrier.period) == 0, "BDPIM-OSD needs N_s divisible by K");
  const std::size_t barriers = symbols / barrier.period;
  require(barriers <= y.size(), "BDPIM-OSD needs Q <= L");
  DetectionResult r;
  r.chips.assign(y.size(), 0.0);
  detail::two_phase_osd(y, 0, y.size(), barriers, barrier, r.chips, r.flags);
  detail::finish_support(r);
  return r;
}

/// Normalized barrier threshold
/// A_T' = (A_H + A_L)/2 + σ_n^2 ln(K−1) / (h^2 (A_H − A_L)).
inline double bdpim_otd_threshold(const BarrierSpec& barrier, double h, double sigma_n) {
  require(barrier.high > barrier.low, "barrier threshold needs A_H > A_L");
  require(barrier.period >= 2, "barrier period K must be >= 2");
  return 0.5 * (barrier.high + barrier.low) +
         sigma_n * sigma_n * std::log(barrier.period - 1.0) / (h * h * (barrier.high - barrier.low));
}

/// Streaming BDPIM detector: a threshold test finds each barrier as it
/// arrives, and the samples buffered since the previous barrier are resolved
/// by OSD (K−1 largest become A_L). Buffer lengths are checked against the
/// chip counts a single K-symbol group can occupy; a buffer too short to hold
/// a group means the crossing was spurious and it stays buffered, and a buffer
/// too long means barriers were missed and it is re-split by two-phase OSD.
class BdpimOtdOsdDetector {
 public:
  BdpimOtdOsdDetector(double threshold, const BarrierSpec& barrier, const ModulationSpec& spec,
                      std::size_t symbols)
      : threshold_(threshold), barrier_(barrier), spec_(spec) {
    barrier.validate();
    require(threshold > 0.0, "barrier threshold must be positive");
    require(symbols % static_cast<std::size_t>(barrier.period) == 0, "BDPIM-OTD-OSD needs N_s divisible by K");
    groups_ = symbols / barrier.period;
  }

  void push(double sample) {
    buffer_.push_back(sample);
    if (sample > threshold_ && detected_ < groups_) try_flush();
  }

  /// Resolves the trailing buffer and returns the detected frame.
  DetectionResult finish() {
    if (!buffer_.empty()) {
      const std::size_t owed = groups_ - detected_;
      if (owed > 0) {
        out_.flags.trailing_segment = true;
        if (detected_ == 0) out_.flags.no_barrier = true;
        emit(owed);
      } else {
        emit_empty();
      }
    }
    detail::finish_support(out_);
    DetectionResult done = std::move(out_);
    out_ = {};
    buffer_.clear();
    detected_ = 0;
    return done;
  }

 private:
  // Buffer ends with a threshold crossing: decide how many groups it closes.
  void try_flush() {
    const auto k = static_cast<std::size_t>(barrier_.period);
    const auto g = static_cast<std::size_t>(spec_.guard());
    const auto widest = static_cast<std::size_t>(spec_.max_symbol_chips());
    const bool first = detected_ == 0 && out_.chips.empty();
    // Chips from the previous barrier (exclusive) through this one (inclusive).
    const std::size_t shortest = first ? (k - 1) * (1 + g) + 1 : k * (1 + g);
    const std::size_t longest = first ? (k - 1) * widest + 1 : k * widest;
    const std::size_t n = buffer_.size();
    if (n < shortest) return;  // spurious crossing: keep buffering
    std::size_t groups = 1;
    if (n > longest) {
      const double expected = k * spec_.avg_symbol_duration();
      groups = std::max<std::size_t>(2, static_cast<std::size_t>(std::llround(n / expected)));
      out_.flags.barrier_recovered = true;
    }
    groups = std::min(groups, groups_ - detected_);
    emit_closed(groups);
  }

  // The last buffered sample is a barrier; groups − 1 more hide in the buffer.
  void emit_closed(std::size_t groups) {
    const std::size_t n = buffer_.size();
    out_.segment_lengths.push_back(n);
    std::vector<double> decided(n, 0.0);
    detail::two_phase_osd(buffer_, 0, n - 1, groups - 1, barrier_, decided, out_.flags, true);
    decided[n - 1] = barrier_.high;
    out_.chips.insert(out_.chips.end(), decided.begin(), decided.end());
    detected_ += groups;
    buffer_.clear();
  }

  void emit(std::size_t groups) {
    out_.segment_lengths.push_back(buffer_.size());
    std::vector<double> decided(buffer_.size(), 0.0);
    detail::two_phase_osd(buffer_, 0, buffer_.size(), groups, barrier_, decided, out_.flags);
    out_.chips.insert(out_.chips.end(), decided.begin(), decided.end());
    detected_ += groups;
    buffer_.clear();
  }

  void emit_empty() {
    out_.chips.insert(out_.chips.end(), buffer_.size(), 0.0);
    buffer_.clear();
  }

  double threshold_;
  BarrierSpec barrier_;
  ModulationSpec spec_;
  std::size_t groups_ = 0;
  std::size_t detected_ = 0;
  std::vector<double> buffer_;
  DetectionResult out_;
};

/// Frame-at-once wrapper around BdpimOtdOsdDetector. `threshold` is the
/// absolute value h·A_T'.
inline DetectionResult bdpim_otd_osd_detect(std::span<const double> y, double threshold, const BarrierSpec& barrier,
                                            const ModulationSpec& spec, std::size_t symbols) {
  BdpimOtdOsdDetector detector(threshold, barrier, spec, symbols);
  for (double sample : y) detector.push(sample);
  return detector.finish();
}

/// Three-level threshold detection for MDPIM: 0 / A_L split by the OTD rule
/// with pulse prior 1/L_s', A_L / A_H split at the midpoint (equiprobable).
inline DetectionResult mdpim_otd_detect(std::span<const double> y, const BaselineLevels& levels,
                                        const ModulationSpec& spec, double h, double sigma_n) {
  const double duration = (spec.order() / 2 + 2 * spec.guard() + 1) / 2.0;
  const double noise = sigma_n * sigma_n / (h * h);
  const double low_cut = levels.low / 2.0 + noise / levels.low * std::log(2.0 * (duration - 1.0));
  const double high_cut = 0.5 * (levels.low + levels.high);
  DetectionResult r;
  r.chips.resize(y.size());
  for (std::size_t t = 0; t < y.size(); ++t) {
    const double v = y[t] / h;
    r.chips[t] = v > high_cut ? levels.high : (v > low_cut ? levels.low : 0.0);
  }
  detail::finish_support(r);
  return r;
}

/// Per-symbol ordered detection for PPM: the largest sample of every M-chip
/// frame is the pulse.
inline DetectionResult ppm_osd_detect(std::span<const double> y, const ModulationSpec& spec, double amplitude) {
  const auto m = static_cast<std::size_t>(spec.order());
  DetectionResult r;
  r.chips.assign(y.size(), 0.0);
  for (std::size_t start = 0; start < y.size(); start += m) {
    const std::size_t stop = std::min(y.size(), start + m);
    r.chips[detail::largest_indices(y, start, stop, 1).front()] = amplitude;
  }
  detail::finish_support(r);
  return r;
}

enum class DelayMode { packet, sample };

/// Storage delay: L/R_c for packet-wise detectors, 1/R_c for sample-wise ones.
inline double storage_delay(std::size_t chips, double chip_rate, DelayMode mode) {
  require(chip_rate > 0.0, "chip rate must be positive");
  return mode == DelayMode::packet ? static_cast<double>(chips) / chip_rate : 1.0 / chip_rate;
}

}  // namespace dpim
