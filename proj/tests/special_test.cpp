#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include <boost/math/distributions/normal.hpp>

#include "dpim/order_stats.hpp"
#include "dpim/special.hpp"

namespace {

TEST(Special, QFunctionMatchesBoostComplement) {
  boost::math::normal_distribution<double> n;
  for (double x : {-3.0, -0.5, 0.0, 1.0, 2.5, 6.0, 10.0})
    EXPECT_NEAR(dpim::q_function(x) / boost::math::cdf(boost::math::complement(n, x)), 1.0, 1e-12) << x;
}

TEST(Special, QuantileInvertsCdf) {
  for (double p : {1e-12, 1e-4, 0.1, 0.5, 0.9, 0.999}) {
    EXPECT_NEAR(dpim::normal_cdf(dpim::normal_quantile(p)) / p, 1.0, 1e-10);
    EXPECT_NEAR(dpim::q_function(dpim::normal_upper_quantile(p)) / p, 1.0, 1e-10);
  }
}

TEST(ErfFast, CloseToErfAtTwo) {
  EXPECT_NEAR(dpim::erf_fast(2.0), 0.99452, 2e-5);
  EXPECT_LT(std::fabs(dpim::erf_fast(2.0) - std::erf(2.0)), 1e-3);
}

TEST(ErfFast, LimitsAndOddness) {
  EXPECT_NEAR(dpim::erf_fast(0.0), 1.0 / 3.0, 1e-15);
  EXPECT_DOUBLE_EQ(dpim::erf_fast(40.0), 1.0);
  EXPECT_DOUBLE_EQ(dpim::erf_fast(-1.3), -dpim::erf_fast(1.3));
}

TEST(ErfTractable, ExactBelowCutoffClosedFormAbove) {
  EXPECT_DOUBLE_EQ(dpim::erfc_tractable(0.4), std::erfc(0.4));
  EXPECT_DOUBLE_EQ(dpim::erfc_tractable(-0.4), std::erfc(-0.4));
  EXPECT_NEAR(dpim::erf_tractable(2.0), dpim::erf_fast(2.0), 1e-15);
  EXPECT_NEAR(dpim::erfc_tractable(-2.0), 2.0 - dpim::erfc_tractable(2.0), 1e-15);
  // The tail stays positive far out, where 1 - erf_fast would round to 0.
  EXPECT_GT(dpim::erfc_tractable(7.0), 0.0);
}

TEST(ExtremeMean, SingleSampleOffset) {
  EXPECT_NEAR(dpim::normal_quantile(dpim::kMinimumQuantileLevel), 0.0662, 5e-4);
  EXPECT_NEAR(dpim::extreme_order_stat_mean(1, 1.0, 0.3, 1.0), 1.0 - 0.0662 * 0.3, 2e-4);
}

TEST(ExtremeMean, NoiselessIsAmplitude) {
  for (int n : {1, 9, 100}) EXPECT_DOUBLE_EQ(dpim::extreme_order_stat_mean(n, 1.7, 0.0, 1.0), 1.7);
}

TEST(ExtremeMean, MinimumOfHundredMatchesSampling) {
  const double a = 1.0, sigma = 0.2;
  const double predicted = dpim::extreme_order_stat_mean(100, a, sigma, 1.0);
  EXPECT_NEAR((a - predicted) / sigma, 2.5, 0.1);

  std::mt19937_64 rng(7);
  std::normal_distribution<double> z(a, sigma);
  double sum = 0.0;
  const int trials = 1000000;
  for (int t = 0; t < trials; ++t) {
    double m = z(rng);
    for (int i = 1; i < 100; ++i) m = std::min(m, z(rng));
    sum += m;
  }
  const double sampled = sum / trials;
  EXPECT_NEAR(predicted / sampled, 1.0, 0.02);
}

TEST(ExtremeMean, RejectsEmptySample) { EXPECT_THROW(dpim::extreme_order_stat_mean(0, 1.0, 1.0, 1.0), dpim::ConfigError); }

}  // namespace
