#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "dpim/error.hpp"
#include "dpim/signal.hpp"

namespace dpim {

/// Rate-1/2 feed-forward code with generators 1+D+D² and 1+D² ((7,5) octal),
/// zero-tail terminated.
struct ConvCodeSpec {
  static constexpr int kMemory = 2;
  static constexpr int kStates = 4;
  static constexpr int kTailBits = kMemory;

  /// Output pair for input bit b from state (b1, b2) packed as b1 | b2 << 1.
  static constexpr std::array<std::uint8_t, 2> outputs(int state, int bit) {
    const int b1 = state & 1, b2 = (state >> 1) & 1;
    return {static_cast<std::uint8_t>(bit ^ b1 ^ b2), static_cast<std::uint8_t>(bit ^ b2)};
  }
  static constexpr int next_state(int state, int bit) { return bit | ((state & 1) << 1); }

  static std::size_t coded_length(std::size_t info_bits) { return 2 * (info_bits + kTailBits); }
  /// Largest information block whose codeword fits in `coded_bits`.
  static std::size_t info_length(std::size_t coded_bits) {
    require(coded_bits >= 2 * (kTailBits + 1) && coded_bits % 2 == 0, "codeword too short");
    return coded_bits / 2 - kTailBits;
  }
};

inline Bits conv_encode(std::span<const std::uint8_t> bits) {
  Bits out;
  out.reserve(ConvCodeSpec::coded_length(bits.size()));
  int state = 0;
  auto push = [&](int b) {
    const auto o = ConvCodeSpec::outputs(state, b);
    out.push_back(o[0]);
    out.push_back(o[1]);
    state = ConvCodeSpec::next_state(state, b);
  };
  for (auto b : bits) push(b & 1);
  for (int t = 0; t < ConvCodeSpec::kTailBits; ++t) push(0);
  return out;
}

/// Hard-decision Viterbi with Hamming branch metric. Traceback starts from the
/// zero state; equal metrics keep the predecessor with the smaller index.
/// Returns the information bits (tail removed).
inline Bits viterbi_decode(std::span<const std::uint8_t> coded) {
  require(coded.size() % 2 == 0, "coded length must be even");
  const std::size_t steps = coded.size() / 2;
  require(steps >= static_cast<std::size_t>(ConvCodeSpec::kTailBits), "codeword shorter than the tail");
  constexpr int S = ConvCodeSpec::kStates;
  constexpr int kInf = std::numeric_limits<int>::max() / 2;
  std::array<int, S> metric{0, kInf, kInf, kInf};
  std::vector<std::array<std::int8_t, S>> from(steps);
  for (std::size_t t = 0; t < steps; ++t) {
    std::array<int, S> next;
    next.fill(kInf);
    std::array<std::int8_t, S> pred;
    pred.fill(-1);
    for (int s = 0; s < S; ++s) {
      if (metric[s] >= kInf) continue;
      for (int b = 0; b < 2; ++b) {
        const auto o = ConvCodeSpec::outputs(s, b);
        const int cost = metric[s] + (o[0] != (coded[2 * t] & 1)) + (o[1] != (coded[2 * t + 1] & 1));
        const int ns = ConvCodeSpec::next_state(s, b);
        if (cost < next[ns]) {  // strict: ascending s keeps the smaller predecessor on ties
          next[ns] = cost;
          pred[ns] = static_cast<std::int8_t>(s);
        }
      }
    }
    metric = next;
    from[t] = pred;
  }
  Bits path(steps);
  int state = 0;
  for (std::size_t t = steps; t-- > 0;) {
    path[t] = static_cast<std::uint8_t>(state & 1);  // newest input bit sits in the low position
    state = from[t][state];
  }
  path.resize(steps - ConvCodeSpec::kTailBits);
  return path;
}

/// Row-column block interleaver: rows of `depth` bits are written in order
/// and read out column by column. Inputs are zero-padded to a whole block.
struct InterleaverSpec {
  std::size_t depth = 20;

  void validate() const { require(depth >= 1, "interleaver depth must be >= 1"); }
  std::size_t padded_length(std::size_t n) const { return (n + depth - 1) / depth * depth; }
};

inline Bits interleave(std::span<const std::uint8_t> bits, const InterleaverSpec& spec) {
  spec.validate();
  const std::size_t n = spec.padded_length(bits.size());
  const std::size_t rows = n / spec.depth;
  Bits out(n, 0);
  for (std::size_t i = 0; i < bits.size(); ++i) {
    const std::size_t r = i / spec.depth, c = i % spec.depth;
    out[c * rows + r] = bits[i];
  }
  return out;
}

/// Inverse of interleave for a whole number of blocks.
inline Bits deinterleave(std::span<const std::uint8_t> bits, const InterleaverSpec& spec) {
  spec.validate();
  require(bits.size() % spec.depth == 0, "deinterleaver input must be a multiple of the depth");
  const std::size_t rows = bits.size() / spec.depth;
  Bits out(bits.size());
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < spec.depth; ++c) out[r * spec.depth + c] = bits[c * rows + r];
  return out;
}

}  // namespace dpim
