#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "dpim/quadrature.hpp"

namespace {

TEST(Quadrature, ExactForPolynomials) {
  auto r = dpim::integrate_adaptive([](double x) { return 3 * x * x * x * x - x + 2; }, -1.0, 2.0, 1e-12);
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(r.intervals, 1);
  EXPECT_NEAR(r.value, 3.0 * 33.0 / 5.0 - 1.5 + 6.0, 1e-12);
}

TEST(Quadrature, GaussianMass) {
  auto r = dpim::integrate_adaptive([](double x) { return std::exp(-0.5 * x * x); }, -12.0, 12.0, 1e-13);
  EXPECT_NEAR(r.value, std::sqrt(2.0 * M_PI), 1e-12);
}

TEST(Quadrature, AgreesWithBoostOnPeakedIntegrand) {
  auto f = [](double x) { return std::exp(-2000.0 * (x - 0.37) * (x - 0.37)) + 0.1 * std::sin(5.0 * x); };
  auto ours = dpim::integrate_adaptive(f, 0.0, 1.0, 1e-12);
  double err = 0.0;
  const double ref = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 0.0, 1.0, 30, 1e-14, &err);
  EXPECT_TRUE(ours.converged);
  EXPECT_NEAR(ours.value, ref, 1e-11);
}

TEST(Quadrature, BreakpointOverloadSumsPanels) {
  const std::vector<double> edges = {0.0, 0.5, 1.0, 3.0};
  auto r = dpim::integrate_adaptive([](double x) { return std::fabs(x - 1.0); }, std::span<const double>(edges),
                                    1e-12);
  EXPECT_NEAR(r.value, 0.5 + 2.0, 1e-12);
}

TEST(Quadrature, ReportsNonConvergence) {
  auto r = dpim::integrate_adaptive([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0, 1e-14, 0.0,
                                    1, 20);
  EXPECT_FALSE(r.converged);
}

TEST(Quadrature, RejectsEmptyPartition) {
  const std::vector<double> edges = {0.0};
  EXPECT_THROW(dpim::integrate_adaptive([](double) { return 1.0; }, std::span<const double>(edges), 1e-9),
               dpim::ConfigError);
}

}  // namespace
