#pragma once

#include <cstdint>
#include <random>

#include <boost/random/normal_distribution.hpp>

namespace dpim {

/// Per-stream engine. Each Monte Carlo packet owns one, seeded from
/// derive_seed(), so results do not depend on how work is scheduled.
using Engine = std::mt19937_64;

/// Ziggurat normal sampler; considerably faster than the polar method.
using NormalDistribution = boost::random::normal_distribution<double>;

/// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Sub-stream seed for (global seed, stream, substream), e.g. (seed, snr index, packet index).
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t substream) {
  return mix64(mix64(mix64(seed) ^ stream) ^ (substream * 0xd1342543de82ef95ULL));
}

inline Engine make_engine(std::uint64_t seed, std::uint64_t stream, std::uint64_t substream) {
  return Engine(derive_seed(seed, stream, substream));
}

}  // namespace dpim
