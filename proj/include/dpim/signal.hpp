#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dpim/error.hpp"

namespace dpim {

enum class Scheme { dpim, bdpim, ppm, mdpim, dhpim };

inline std::string_view to_string(Scheme s) {
  switch (s) {
    case Scheme::dpim: return "dpim";
    case Scheme::bdpim: return "bdpim";
    case Scheme::ppm: return "ppm";
    case Scheme::mdpim: return "mdpim";
    case Scheme::dhpim: return "dhpim";
  }
  return "?";
}

inline std::optional<Scheme> parse_scheme(std::string_view s) {
  for (auto v : {Scheme::dpim, Scheme::bdpim, Scheme::ppm, Scheme::mdpim, Scheme::dhpim})
    if (to_string(v) == s) return v;
  return std::nullopt;
}

/// Binary block, one bit per byte (0 or 1). Symbols are packed MSB first.
using Bits = std::vector<std::uint8_t>;

/// Modulation order M (power of two, >= 2) and guard-interval count g.
class ModulationSpec {
 public:
  ModulationSpec(int order = 4, int guard = 1) : order_(order), guard_(guard) {
    require(order >= 2 && (order & (order - 1)) == 0, "modulation order must be a power of two >= 2");
    require(guard >= 0, "guard interval count must be non-negative");
    bits_ = 0;
    while ((1 << bits_) < order) ++bits_;
  }

  int order() const { return order_; }
  int guard() const { return guard_; }
  int bits_per_symbol() const { return bits_; }

  /// (M + 2g + 1) / 2 chips; always a half-integer, so exact in binary floating point.
  double avg_symbol_duration() const { return (order_ + 2 * guard_ + 1) / 2.0; }
  int min_symbol_chips() const { return 1 + guard_; }
  int max_symbol_chips() const { return order_ + guard_; }

  bool operator==(const ModulationSpec&) const = default;

 private:
  int order_;
  int guard_;
  int bits_;
};

inline double avg_symbol_duration(const ModulationSpec& spec) { return spec.avg_symbol_duration(); }

/// A_H = K·A − (K−1)·A_L, the barrier amplitude that keeps the per-K-symbol
/// optical power equal to K·A.
inline double barrier_amplitude(int period, double average, double low) {
  require(period >= 2, "barrier period K must be >= 2");
  require(low > 0.0, "A_L must be positive");
  require(low < average, "A_L must be below the average amplitude A");
  return period * average - (period - 1) * low;
}

/// Two-level BDPIM amplitude plan: every K-th pulse at A_H, the rest at A_L.
struct BarrierSpec {
  int period = 10;
  double average = 1.0;
  double low = 0.86;
  double high = 2.26;

  static BarrierSpec from_low(int period, double average, double low) {
    return BarrierSpec{period, average, low, barrier_amplitude(period, average, low)};
  }

  void validate() const {
    require(period >= 2, "barrier period K must be >= 2");
    require(average > 0.0, "average amplitude must be positive");
    require(low > 0.0 && low < high, "barrier amplitudes must satisfy 0 < A_L < A_H");
    const double budget = period * average;
    require(std::fabs((period - 1) * low + high - budget) <= 1e-12 * budget,
            "barrier amplitudes violate the power constraint (K-1)A_L + A_H = K A");
  }
};

struct ChipFrame {
  std::vector<double> chips;
  std::size_t symbols = 0;
  Scheme scheme = Scheme::dpim;
};

namespace detail {

inline std::vector<int> pack_symbols(std::span<const std::uint8_t> bits, int bits_per_symbol) {
  require(bits.size() % static_cast<std::size_t>(bits_per_symbol) == 0,
          "bit block length must be a multiple of log2(M)");
  std::vector<int> symbols(bits.size() / bits_per_symbol);
  for (std::size_t s = 0; s < symbols.size(); ++s) {
    int v = 0;
    for (int b = 0; b < bits_per_symbol; ++b) v = (v << 1) | (bits[s * bits_per_symbol + b] & 1);
    symbols[s] = v;
  }
  return symbols;
}

inline void append_symbol_bits(int value, int bits_per_symbol, Bits& out) {
  for (int b = bits_per_symbol - 1; b >= 0; --b) out.push_back(static_cast<std::uint8_t>((value >> b) & 1));
}

inline void append_pulse(std::vector<double>& chips, double amplitude, int zeros) {
  chips.push_back(amplitude);
  chips.insert(chips.end(), static_cast<std::size_t>(zeros), 0.0);
}

}  // namespace detail

/// DPIM: symbol value v becomes a pulse followed by v + g empty chips.
inline ChipFrame map_dpim(std::span<const std::uint8_t> bits, const ModulationSpec& spec, double amplitude) {
  const auto symbols = detail::pack_symbols(bits, spec.bits_per_symbol());
  ChipFrame frame{{}, symbols.size(), Scheme::dpim};
  frame.chips.reserve(symbols.size() * (spec.max_symbol_chips()));
  for (int v : symbols) detail::append_pulse(frame.chips, amplitude, v + spec.guard());
  return frame;
}

/// BDPIM: DPIM intervals, pulse n (1-based) at A_H when n mod K == 0, A_L otherwise.
inline ChipFrame map_bdpim(std::span<const std::uint8_t> bits, const ModulationSpec& spec,
                           const BarrierSpec& barrier) {
  barrier.validate();
  const auto symbols = detail::pack_symbols(bits, spec.bits_per_symbol());
  require(symbols.size() % static_cast<std::size_t>(barrier.period) == 0,
          "BDPIM symbol count must be divisible by K");
  ChipFrame frame{{}, symbols.size(), Scheme::bdpim};
  frame.chips.reserve(symbols.size() * spec.max_symbol_chips());
  for (std::size_t n = 0; n < symbols.size(); ++n) {
    const bool is_barrier = (n + 1) % barrier.period == 0;
    detail::append_pulse(frame.chips, is_barrier ? barrier.high : barrier.low, symbols[n] + spec.guard());
  }
  return frame;
}

/// Amplitudes for the comparison schemes. PPM and DHPIM use `peak`; MDPIM
/// uses `low`/`high`.
struct BaselineLevels {
  double peak = 1.0;
  double low = 0.5;
  double high = 1.0;
};

/// MDPIM levels with A_H = ratio·A_L, scaled so the average optical power per
/// chip matches DPIM at peak amplitude `reference` with the same M and g.
inline BaselineLevels mdpim_levels(const ModulationSpec& spec, double reference, double ratio = 2.0) {
  require(ratio > 1.0, "MDPIM level ratio must exceed 1");
  const double half_duration = (spec.order() / 2 + 2 * spec.guard() + 1) / 2.0;
  const double low = 2.0 * reference * half_duration / ((1.0 + ratio) * spec.avg_symbol_duration());
  return BaselineLevels{reference, low, ratio * low};
}

/// Table-mapped baselines: PPM (one pulse in M slots), MDPIM (amplitude
/// carries the MSB, interval the rest), DHPIM (single- or double-width header).
inline ChipFrame map_baseline(Scheme scheme, std::span<const std::uint8_t> bits, const ModulationSpec& spec,
                              const BaselineLevels& levels) {
  const auto symbols = detail::pack_symbols(bits, spec.bits_per_symbol());
  const int half = spec.order() / 2;
  const int g = spec.guard();
  ChipFrame frame{{}, symbols.size(), scheme};
  switch (scheme) {
    case Scheme::ppm:
      frame.chips.assign(symbols.size() * spec.order(), 0.0);
      for (std::size_t n = 0; n < symbols.size(); ++n) frame.chips[n * spec.order() + symbols[n]] = levels.peak;
      break;
    case Scheme::mdpim:
      require(levels.low > 0.0 && levels.low < levels.high, "MDPIM needs 0 < A_L < A_H");
      for (int v : symbols) {
        if (v < half) detail::append_pulse(frame.chips, levels.low, v + g);
        else detail::append_pulse(frame.chips, levels.high, v - half + g);
      }
      break;
    case Scheme::dhpim:
      require(g >= 1, "DHPIM needs at least one guard chip to separate headers");
      for (int v : symbols) {
        if (v < half) {
          detail::append_pulse(frame.chips, levels.peak, v + g);
        } else {
          frame.chips.push_back(levels.peak);
          detail::append_pulse(frame.chips, levels.peak, v - half + g);
        }
      }
      break;
    default:
      throw ConfigError("map_baseline supports ppm, mdpim and dhpim only");
  }
  return frame;
}

/// How the DPIM demapper treats intervals longer than M + g chips.
enum class IntervalPolicy {
  /// Split greedily into maximal symbols; leading empty chips form a symbol of
  /// their own. For detectors whose pulse count is not known (OTD).
  greedy_split,
  /// Exactly one symbol per detected pulse; long intervals clamp to M − 1.
  /// For detectors that output exactly N_s pulses (OSD, MLSD, BDPIM).
  one_per_pulse,
};

struct Demapped {
  Bits bits;
  std::size_t symbols = 0;   // decoded before truncation/padding
  std::size_t repaired = 0;  // intervals clamped or split
  bool no_pulses = false;
  bool flagged() const { return no_pulses || repaired > 0; }
};

namespace detail {

inline void fit_length(Demapped& out, std::optional<std::size_t> expected_symbols, int bits_per_symbol) {
  if (expected_symbols) out.bits.resize(*expected_symbols * bits_per_symbol, 0);
}

// Decodes one interval of `len` chips into DPIM symbol values (0-based,
// before adding any level offset) with the given upper symbol bound.
inline void decode_interval(std::size_t len, int guard, int max_value, IntervalPolicy policy,
                            std::vector<int>& values, std::size_t& repaired) {
  const long long span = max_value + 1 + guard;  // chips of the longest symbol
  long long rest = static_cast<long long>(len);
  if (rest > span) {
    ++repaired;
    if (policy == IntervalPolicy::one_per_pulse) {
      values.push_back(max_value);
      return;
    }
    while (rest > span) {
      values.push_back(max_value);
      rest -= span;
    }
  }
  const long long v = rest - 1 - guard;
  if (v < 0) ++repaired;
  values.push_back(v < 0 ? 0 : static_cast<int>(v));
}

}  // namespace detail

/// Hard-decision DPIM demapper: nonzero chips are pulses; each interval of
/// v + 1 + g chips decodes to symbol v. Output is truncated or zero-padded to
/// `expected_symbols` symbols when given.
inline Demapped demap_dpim(std::span<const double> chips, const ModulationSpec& spec,
                           std::optional<std::size_t> expected_symbols = std::nullopt,
                           IntervalPolicy policy = IntervalPolicy::greedy_split) {
  require(!chips.empty(), "cannot demap an empty chip sequence");
  Demapped out;
  std::vector<std::size_t> pulses;
  for (std::size_t t = 0; t < chips.size(); ++t)
    if (chips[t] != 0.0) pulses.push_back(t);
  if (pulses.empty()) {
    out.no_pulses = true;
    detail::fit_length(out, expected_symbols, spec.bits_per_symbol());
    return out;
  }
  std::vector<int> values;
  values.reserve(pulses.size() + 4);
  if (pulses.front() > 0 && policy == IntervalPolicy::greedy_split)
    detail::decode_interval(pulses.front(), spec.guard(), spec.order() - 1, policy, values, out.repaired);
  for (std::size_t i = 0; i < pulses.size(); ++i) {
    const std::size_t end = i + 1 < pulses.size() ? pulses[i + 1] : chips.size();
    detail::decode_interval(end - pulses[i], spec.guard(), spec.order() - 1, policy, values, out.repaired);
  }
  out.symbols = values.size();
  out.bits.reserve(values.size() * spec.bits_per_symbol());
  for (int v : values) detail::append_symbol_bits(v, spec.bits_per_symbol(), out.bits);
  detail::fit_length(out, expected_symbols, spec.bits_per_symbol());
  return out;
}

/// PPM demapper over consecutive M-chip frames; the first pulse in a frame wins.
inline Demapped demap_ppm(std::span<const double> chips, const ModulationSpec& spec,
                          std::optional<std::size_t> expected_symbols = std::nullopt) {
  require(!chips.empty(), "cannot demap an empty chip sequence");
  const auto m = static_cast<std::size_t>(spec.order());
  Demapped out;
  bool any = false;
  for (std::size_t start = 0; start < chips.size(); start += m) {
    const std::size_t stop = std::min(chips.size(), start + m);
    int value = -1, count = 0;
    for (std::size_t t = start; t < stop; ++t)
      if (chips[t] != 0.0 && count++ == 0) value = static_cast<int>(t - start);
    if (count != 1) ++out.repaired;
    any = any || count > 0;
    detail::append_symbol_bits(value < 0 ? 0 : value, spec.bits_per_symbol(), out.bits);
    ++out.symbols;
  }
  out.no_pulses = !any;
  detail::fit_length(out, expected_symbols, spec.bits_per_symbol());
  return out;
}

/// MDPIM demapper. Pulses above `level_split` are high-level headers and
/// contribute the MSB; intervals carry the remaining bits.
inline Demapped demap_mdpim(std::span<const double> chips, const ModulationSpec& spec, double level_split,
                            std::optional<std::size_t> expected_symbols = std::nullopt) {
  require(!chips.empty(), "cannot demap an empty chip sequence");
  const int half = spec.order() / 2;
  Demapped out;
  std::vector<std::size_t> pulses;
  for (std::size_t t = 0; t < chips.size(); ++t)
    if (chips[t] != 0.0) pulses.push_back(t);
  if (pulses.empty()) {
    out.no_pulses = true;
    detail::fit_length(out, expected_symbols, spec.bits_per_symbol());
    return out;
  }
  std::vector<int> values;
  if (pulses.front() > 0)
    detail::decode_interval(pulses.front(), spec.guard(), half - 1, IntervalPolicy::greedy_split, values,
                            out.repaired);
  for (std::size_t i = 0; i < pulses.size(); ++i) {
    const std::size_t end = i + 1 < pulses.size() ? pulses[i + 1] : chips.size();
    const std::size_t first = values.size();
    detail::decode_interval(end - pulses[i], spec.guard(), half - 1, IntervalPolicy::greedy_split, values,
                            out.repaired);
    if (chips[pulses[i]] > level_split) values[first] += half;
  }
  out.symbols = values.size();
  for (int v : values) detail::append_symbol_bits(v, spec.bits_per_symbol(), out.bits);
  detail::fit_length(out, expected_symbols, spec.bits_per_symbol());
  return out;
}

/// DHPIM demapper for hard-decision chips: a run of two pulse chips is the
/// double-width header of the upper symbol half.
inline Demapped demap_dhpim(std::span<const double> chips, const ModulationSpec& spec,
                            std::optional<std::size_t> expected_symbols = std::nullopt) {
  require(!chips.empty(), "cannot demap an empty chip sequence");
  const int half = spec.order() / 2;
  Demapped out;
  std::vector<int> values;
  std::size_t t = 0;
  while (t < chips.size() && chips[t] == 0.0) ++t;
  if (t == chips.size()) {
    out.no_pulses = true;
    detail::fit_length(out, expected_symbols, spec.bits_per_symbol());
    return out;
  }
  if (t > 0) ++out.repaired;
  while (t < chips.size()) {
    const bool wide = t + 1 < chips.size() && chips[t + 1] != 0.0;
    const std::size_t body = t + (wide ? 2 : 1);
    std::size_t next = body;
    while (next < chips.size() && chips[next] == 0.0) ++next;
    const long long zeros = static_cast<long long>(next - body);
    long long v = zeros - spec.guard();
    if (v < 0 || v >= half) ++out.repaired;
    v = std::clamp<long long>(v, 0, half - 1);
    values.push_back(static_cast<int>(v) + (wide ? half : 0));
    t = next;
  }
  out.symbols = values.size();
  for (int v : values) detail::append_symbol_bits(v, spec.bits_per_symbol(), out.bits);
  detail::fit_length(out, expected_symbols, spec.bits_per_symbol());
  return out;
}

}  // namespace dpim
