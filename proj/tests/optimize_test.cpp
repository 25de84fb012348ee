#include <gtest/gtest.h>

#include <cmath>

#include "dpim/bounds.hpp"
#include "dpim/optimize.hpp"
#include "dpim/study.hpp"

namespace {

TEST(GoldenSection, FindsParabolaMinimum) {
  const auto m = dpim::golden_section([](double x) { return (x - 0.3) * (x - 0.3) + 2.0; }, 0.0, 1.0, 1e-6);
  EXPECT_NEAR(m.x, 0.3, 1e-6);
  EXPECT_NEAR(m.value, 2.0, 1e-12);
  EXPECT_THROW(dpim::golden_section([](double x) { return x; }, 1.0, 0.0, 1e-3), dpim::ConfigError);
}

TEST(OptimizeBarrier, FlatObjectiveReturnsMidpoint) {
  const auto r = dpim::optimize_barrier(10, 1.0, [](const dpim::BarrierSpec&) { return 0.125; });
  EXPECT_DOUBLE_EQ(r.barrier.low, 0.5);
  EXPECT_DOUBLE_EQ(r.objective, 0.125);
}

TEST(OptimizeBarrier, GridRescuesSecondBasin) {
  // Shallow basin at 0.2 catches golden section; the deeper one sits at 0.9.
  auto f = [](const dpim::BarrierSpec& b) {
    const double x = b.low;
    return std::min(0.5 + 20 * (x - 0.2) * (x - 0.2), 0.1 + 400 * (x - 0.9) * (x - 0.9));
  };
  const auto r = dpim::optimize_barrier(10, 1.0, f, 1e-4);
  EXPECT_NEAR(r.barrier.low, 0.9, 1e-3);
  EXPECT_NEAR(r.objective, 0.1, 1e-6);
}

TEST(OptimizeBarrier, OutputSatisfiesPowerConstraint) {
  const auto r = dpim::optimize_barrier(7, 2.0, [](const dpim::BarrierSpec& b) { return std::fabs(b.low - 1.3); });
  EXPECT_NO_THROW(r.barrier.validate());
  EXPECT_GT(r.barrier.low, 0.0);
  EXPECT_LT(r.barrier.low, 2.0);
  EXPECT_GT(r.barrier.high, 2.0);
  EXPECT_NEAR(r.barrier.low, 1.3, 1e-3);
}

dpim::RunConfig bdpim_config() {
  dpim::RunConfig c;
  c.scheme = dpim::Scheme::bdpim;
  c.detector = dpim::Detector::bdpim_osd;
  c.snr_db = {17.0};
  return c;
}

TEST(OptimizeBarrier, BoundObjectiveNearCaptionOperatingPoint) {
  const auto r = dpim::optimize_barrier_bound(bdpim_config(), dpim::kUncodedOperatingSnrDb);
  EXPECT_NEAR(r.barrier.low, 0.86, 0.1);
  EXPECT_TRUE(r.grid_agrees);

  // Exhaustive 10^4-point scan of the same objective.
  const auto base = dpim::BoundInput::at_snr({4, 1}, 100, dpim::kUncodedOperatingSnrDb);
  double best_x = 0.0, best = 1.0;
  for (int i = 0; i < 10000; ++i) {
    const double low = 1e-4 + (1.0 - 2e-4) * i / 9999.0;
    const double v =
        dpim::ber_bound_bdpim_osd(base.with_barrier(dpim::BarrierSpec::from_low(10, 1.0, low)), dpim::BoundMode::exact)
            .value;
    if (v < best) best = v, best_x = low;
  }
  EXPECT_NEAR(r.barrier.low, best_x, 1e-3 + 1e-4);
  EXPECT_LE(r.objective, best * (1 + 1e-6));
}

TEST(ThresholdSearch, InterpolatesInLogBer) {
  // BER = 10^{-(snr - 10.3)/2}: crosses 1e-3 at 16.3 dB.
  auto probe = [](double snr) { return dpim::ThresholdProbe{snr, std::pow(10.0, -(snr - 10.3) / 2.0), 0.0}; };
  const auto r = dpim::snr_threshold_search(probe, 1e-3, 10.0, 22.0);
  EXPECT_TRUE(r.resolved);
  EXPECT_NEAR(r.snr_db, 16.3, 1e-9);
  EXPECT_GE(r.trace.size(), 3u);
}

TEST(ThresholdSearch, StopsWhenConfidenceStraddlesTarget) {
  auto probe = [](double snr) { return dpim::ThresholdProbe{snr, std::pow(10.0, -(snr - 10.0) / 2.0), 5e-3}; };
  const auto r = dpim::snr_threshold_search(probe, 1e-3, 10.0, 22.0);
  EXPECT_FALSE(r.resolved);
}

TEST(ThresholdSearch, RequiresBracket) {
  auto probe = [](double snr) { return dpim::ThresholdProbe{snr, 0.1 / snr, 0.0}; };
  EXPECT_THROW(dpim::snr_threshold_search(probe, 1e-3, 10.0, 22.0), dpim::NumericalError);
  EXPECT_THROW(dpim::snr_threshold_search(probe, 0.7, 10.0, 22.0), dpim::ConfigError);
}

}  // namespace
