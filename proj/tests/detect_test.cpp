#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "dpim/bounds.hpp"
#include "dpim/channel.hpp"
#include "dpim/detect.hpp"
#include "dpim/signal.hpp"
#include "oracles.hpp"

namespace {

using Support = std::vector<std::size_t>;

dpim::Bits random_bits(std::size_t n, std::mt19937_64& rng) {
  dpim::Bits b(n);
  for (auto& x : b) x = static_cast<std::uint8_t>(rng() & 1);
  return b;
}

TEST(OtdThreshold, ClosedForm) {
  EXPECT_NEAR(dpim::otd_threshold(1.0, 1.0, 10.0, 3.5), 0.5 + 0.1 * std::log(2.5), 1e-15);
  EXPECT_NEAR(dpim::otd_threshold(1.0, 1.0, 10.0, 3.5), 0.5916, 1e-4);
  EXPECT_NEAR(dpim::otd_threshold(1.0, 1.0, 1e12, 3.5), 0.5, 1e-12);
  EXPECT_DOUBLE_EQ(dpim::otd_threshold(2.0, 0.7, 0.3, 2.0), 1.0);
  EXPECT_THROW(dpim::otd_threshold(1.0, 1.0, 10.0, 1.0), dpim::ConfigError);
}

TEST(OtdDetect, NoiselessAndSilent) {
  const std::vector<double> x = {1, 0, 0, 1, 0, 1, 0, 0, 0};
  EXPECT_EQ(dpim::otd_detect(x, {0.3, 1.0}).chips, x);
  EXPECT_TRUE(dpim::otd_detect(std::vector<double>(6, 0.0), {0.5, 1.0}).support.empty());
}

TEST(OtdDetect, ChipErrorRateMatchesClosedForm) {
  const dpim::ModulationSpec spec(4, 1);
  const double gamma = 10.0;
  const auto state = dpim::ChannelState::from_snr_db(10.0);
  const double at = dpim::otd_threshold(1.0, 1.0, gamma, spec.avg_symbol_duration());
  std::mt19937_64 bits_rng(1);
  dpim::Engine rng(2);
  std::uint64_t errors = 0, total = 0;
  while (total < 10000000) {
    const auto f = dpim::map_dpim(random_bits(20000, bits_rng), spec, 1.0);
    const auto y = dpim::apply_awgn(f.chips, state, rng);
    const auto d = dpim::otd_detect(y, {at, 1.0});
    for (std::size_t t = 0; t < y.size(); ++t) errors += d.chips[t] != f.chips[t];
    total += y.size();
  }
  const auto p = oracle::proportion(errors, total);
  EXPECT_NEAR(p.p, dpim::chip_error_prob_dpim(gamma, 1.0, spec.avg_symbol_duration()), 3 * p.sd);
}

TEST(OsdDetect, Examples) {
  const std::vector<double> y = {0.9, 0.1, 0.2, 0.8};
  EXPECT_EQ(dpim::osd_detect(y, 2, 1.0).support, (Support{0, 3}));
  EXPECT_EQ(dpim::osd_detect(y, 4, 1.0).support, (Support{0, 1, 2, 3}));
  EXPECT_THROW(dpim::osd_detect(y, 5, 1.0), dpim::ConfigError);
}

TEST(OsdDetect, TiesPreferLowerIndex) {
  const std::vector<double> y = {0.5, 0.5, 0.5, 0.1};
  EXPECT_EQ(dpim::osd_detect(y, 2, 1.0).support, (Support{0, 1}));
}

TEST(OsdDetect, ScaleInvariantAndExactCount) {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> z;
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<double> y(30), cy(30);
    for (int i = 0; i < 30; ++i) y[i] = z(rng), cy[i] = 3.7 * y[i];
    const auto a = dpim::osd_detect(y, 9, 1.0), b = dpim::osd_detect(cy, 9, 1.0);
    ASSERT_EQ(a.support, b.support);
    ASSERT_EQ(a.support.size(), 9u);
  }
}

TEST(Mlsd, BruteForceExample) {
  const std::vector<double> y = {0.9, 0.1, 0.2, 0.8};
  EXPECT_EQ(dpim::mlsd_exhaustive(y, 1.0, 2, 1.0).support, (Support{0, 3}));
}

TEST(Mlsd, NoiselessRecovery) {
  const std::vector<double> x = {1, 0, 0, 1, 0, 0, 0, 1, 0};
  EXPECT_EQ(dpim::mlsd_exhaustive(x, 0.8, 3, 1.0).chips, x);
}

TEST(Mlsd, MatchesOsdOnRandomTrials) {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> z;
  for (int trial = 0; trial < 10000; ++trial) {
    const std::size_t n = 6 + rng() % 10, k = 1 + rng() % 4;
    std::vector<double> y(n);
    for (auto& v : y) v = z(rng);
    ASSERT_EQ(dpim::mlsd_exhaustive(y, 1.3, k, 1.0).support, dpim::osd_detect(y, k, 1.0).support);
  }
}

TEST(Mlsd, EnumerationCap) {
  const std::vector<double> y(60, 0.0);
  EXPECT_THROW(dpim::mlsd_exhaustive(y, 1.0, 20, 1.0), dpim::NumericalError);
  EXPECT_DOUBLE_EQ(dpim::binomial_count(10, 3), 120.0);
}

TEST(Omp, MatchesOsd) {
  const std::vector<double> y = {0.9, 0.1, 0.2, 0.8};
  EXPECT_EQ(dpim::omp_detect(y, 2, 1.0).support, (Support{0, 3}));
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> u(-2.0, 3.0);
  for (int trial = 0; trial < 10000; ++trial) {
    std::vector<double> v(40);
    for (auto& x : v) x = u(rng);
    const std::size_t k = 1 + rng() % 40;
    ASSERT_EQ(dpim::omp_detect(v, k, 1.0).support, dpim::osd_detect(v, k, 1.0).support);
  }
}

const dpim::BarrierSpec kBarrier = dpim::BarrierSpec::from_low(10, 1.0, 0.86);

TEST(BdpimOsd, NoiselessRecovery) {
  std::mt19937_64 rng(12);
  const dpim::ModulationSpec spec(4, 1);
  for (int trial = 0; trial < 200; ++trial) {
    const auto f = dpim::map_bdpim(random_bits(200, rng), spec, kBarrier);
    const auto d = dpim::bdpim_osd_detect(f.chips, 100, kBarrier);
    ASSERT_EQ(d.chips, f.chips);
    ASSERT_FALSE(d.flags.any());
  }
}

TEST(BdpimOsd, SingleGroupPicksGlobalMaximum) {
  const auto b = dpim::BarrierSpec::from_low(3, 1.0, 0.9);
  const std::vector<double> y = {0.8, 0.1, 1.4, 0.2, 0.7, 0.0};
  const auto d = dpim::bdpim_osd_detect(y, 3, b);
  EXPECT_EQ(d.chips[2], b.high);
  EXPECT_EQ(d.chips[0], b.low);
  EXPECT_EQ(d.chips[1], b.low);
  EXPECT_EQ(d.chips[4], 0.0);
}

TEST(BdpimOsd, ShortSegmentFlagged) {
  const auto b = dpim::BarrierSpec::from_low(3, 1.0, 0.5);
  const std::vector<double> y = {2.0, 0.1, 0.2, 0.3, 0.4, 2.0};
  const auto d = dpim::bdpim_osd_detect(y, 6, b);
  EXPECT_TRUE(d.flags.short_segment);
  EXPECT_EQ(d.chips[0], b.high);
}

TEST(BdpimOsd, PhaseOneErrorMatchesOrFunction) {
  // Phase 1 fails when the smallest barrier sample is below the largest low pulse.
  const dpim::ModulationSpec spec(4, 1);
  const double sigma = 0.3;
  const int trials = 100000;
  std::mt19937_64 bits_rng(14);
  dpim::Engine rng(15);
  int failures = 0;
  for (int t = 0; t < trials; ++t) {
    const auto f = dpim::map_bdpim(random_bits(200, bits_rng), spec, kBarrier);
    const auto y = dpim::apply_awgn(f.chips, {1.0, sigma}, rng);
    double min_high = 1e300, max_low = -1e300;
    for (std::size_t i = 0; i < y.size(); ++i) {
      if (f.chips[i] == kBarrier.high) min_high = std::min(min_high, y[i]);
      else if (f.chips[i] == kBarrier.low) max_low = std::max(max_low, y[i]);
    }
    const auto d = dpim::bdpim_osd_detect(y, 100, kBarrier);
    bool barriers_ok = true;
    for (std::size_t i = 0; i < y.size(); ++i) barriers_ok = barriers_ok && ((d.chips[i] == kBarrier.high) == (f.chips[i] == kBarrier.high));
    ASSERT_EQ(barriers_ok, !(max_low > min_high));
    failures += !barriers_ok;
  }
  const auto p = oracle::proportion(failures, trials);
  const double predicted = dpim::or_exact({kBarrier.low, 1, 90, kBarrier.high, 10, 10, sigma}).value;
  EXPECT_NEAR(p.p, predicted, 3 * p.sd + 1e-4);
}

TEST(BdpimOtdThreshold, ClosedForm) {
  EXPECT_NEAR(dpim::bdpim_otd_threshold(kBarrier, 1.0, 0.5), 1.56 + 0.25 * std::log(9.0) / 1.4, 1e-12);
  EXPECT_NEAR(dpim::bdpim_otd_threshold(kBarrier, 1.0, 0.5), 1.9524, 1e-4);
  EXPECT_DOUBLE_EQ(dpim::bdpim_otd_threshold(kBarrier, 1.0, 0.0), 1.56);
  const auto k2 = dpim::BarrierSpec::from_low(2, 1.0, 0.5);
  EXPECT_DOUBLE_EQ(dpim::bdpim_otd_threshold(k2, 1.0, 3.0), 1.0);
  EXPECT_THROW(dpim::bdpim_otd_threshold(dpim::BarrierSpec{10, 1.0, 1.0, 1.0}, 1.0, 0.5), dpim::ConfigError);
}

TEST(BdpimOtdOsd, NoiselessRecovery) {
  std::mt19937_64 rng(16);
  const dpim::ModulationSpec spec(4, 1);
  for (int trial = 0; trial < 200; ++trial) {
    const auto f = dpim::map_bdpim(random_bits(200, rng), spec, kBarrier);
    const auto d = dpim::bdpim_otd_osd_detect(f.chips, 1.56, kBarrier, spec, 100);
    ASSERT_EQ(d.chips, f.chips);
    ASSERT_FALSE(d.flags.any());
    ASSERT_EQ(d.segment_lengths.size(), 10u);
  }
}

TEST(BdpimOtdOsd, NoBarrierProcessesWholeFrame) {
  const dpim::ModulationSpec spec(4, 1);
  std::mt19937_64 rng(18);
  const auto f = dpim::map_bdpim(random_bits(40, rng), spec, kBarrier);
  const auto d = dpim::bdpim_otd_osd_detect(f.chips, 100.0, kBarrier, spec, 20);
  EXPECT_TRUE(d.flags.no_barrier);
  EXPECT_EQ(d.support.size(), 20u);
}

// Count the barrier segments whose detected chips differ from the sent ones.
std::size_t corrupted_segments(const std::vector<double>& sent, const std::vector<double>& got) {
  std::size_t bad = 0;
  bool dirty = false;
  for (std::size_t t = 0; t < sent.size(); ++t) {
    dirty = dirty || sent[t] != got[t];
    if (sent[t] == kBarrier.high || t + 1 == sent.size()) {
      bad += dirty;
      dirty = false;
    }
  }
  return bad;
}

TEST(BdpimOtdOsd, MissedBarrierStaysLocal) {
  std::mt19937_64 rng(19);
  const dpim::ModulationSpec spec(4, 1);
  int checked = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const auto f = dpim::map_bdpim(random_bits(200, rng), spec, kBarrier);
    std::vector<std::size_t> highs;
    for (std::size_t t = 0; t < f.chips.size(); ++t)
      if (f.chips[t] == kBarrier.high) highs.push_back(t);
    auto y = f.chips;
    const std::size_t victim = highs[1 + rng() % 7];
    y[victim] = kBarrier.low;  // barrier pulse pushed below the threshold
    const auto d = dpim::bdpim_otd_osd_detect(y, 1.56, kBarrier, spec, 100);
    ASSERT_EQ(d.chips.size(), f.chips.size());
    ASSERT_LE(corrupted_segments(f.chips, d.chips), 2u);
    ++checked;
  }
  EXPECT_EQ(checked, 500);
}

TEST(BdpimOtdOsd, BufferedSegmentsAverageOneGroup) {
  std::mt19937_64 rng(20);
  const dpim::ModulationSpec spec(4, 1);
  double sum = 0.0, frames = 0.0, count = 0.0;
  for (int trial = 0; trial < 2000; ++trial) {
    const auto f = dpim::map_bdpim(random_bits(200, rng), spec, kBarrier);
    const auto d = dpim::bdpim_otd_osd_detect(f.chips, 1.56, kBarrier, spec, 100);
    for (auto n : d.segment_lengths) sum += n, count += 1;
    frames += f.chips.size();
  }
  const double packet_delay = dpim::storage_delay(static_cast<std::size_t>(frames / 2000), 1e6, dpim::DelayMode::packet);
  const double segment_delay = (sum / count) / 1e6;
  EXPECT_NEAR(segment_delay / packet_delay, 0.1, 0.01);
}

TEST(StorageDelay, Modes) {
  EXPECT_DOUBLE_EQ(dpim::storage_delay(350, 1e6, dpim::DelayMode::packet), 350e-6);
  EXPECT_DOUBLE_EQ(dpim::storage_delay(12345, 1e6, dpim::DelayMode::sample), 1e-6);
  EXPECT_THROW(dpim::storage_delay(1, 0.0, dpim::DelayMode::sample), dpim::ConfigError);
}

TEST(OtdDetect, ChipErrorsFallWithSnr) {
  const dpim::ModulationSpec spec(4, 1);
  std::mt19937_64 bits_rng(21);
  const auto f = dpim::map_dpim(random_bits(200000, bits_rng), spec, 1.0);
  std::uint64_t prev = UINT64_MAX;
  for (double snr = 4.0; snr <= 14.0; snr += 2.0) {
    dpim::Engine rng(22);
    const auto s = dpim::ChannelState::from_snr_db(snr);
    const auto y = dpim::apply_awgn(f.chips, s, rng);
    const auto d = dpim::otd_detect(y, {dpim::otd_threshold(1.0, 1.0, s.gamma(), 3.5), 1.0});
    std::uint64_t e = 0;
    for (std::size_t t = 0; t < y.size(); ++t) e += d.chips[t] != f.chips[t];
    EXPECT_LE(e, prev);
    prev = e;
  }
}

}  // namespace
