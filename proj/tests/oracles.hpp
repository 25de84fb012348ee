#pragma once

// Reference computations written independently of the library, used as
// test oracles.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

namespace oracle {

inline double choose(int n, int k) {
  double c = 1.0;
  for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
  return c;
}

// Pr{k-th largest of n <= v} when each draw is <= v with probability F.
inline double kth_largest_cdf(double F, int k, int n) {
  double s = 0.0;
  for (int j = n + 1 - k; j <= n; ++j) s += choose(n, j) * std::pow(F, j) * std::pow(1.0 - F, n - j);
  return s;
}

inline double phi(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// k-th largest of `draws` (1-based rank).
inline double kth_largest(std::vector<double>& draws, int k) {
  std::nth_element(draws.begin(), draws.begin() + (k - 1), draws.end(), std::greater<>());
  return draws[k - 1];
}

// Kolmogorov-Smirnov distance between a sample and a CDF.
template <class Cdf>
double ks_distance(std::vector<double> sample, Cdf cdf) {
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = cdf(sample[i]);
    d = std::max({d, std::fabs(f - i / n), std::fabs((i + 1) / n - f)});
  }
  return d;
}

struct Proportion {
  double p = 0.0;
  double sd = 0.0;  // standard error of p
};

inline Proportion proportion(std::uint64_t hits, std::uint64_t trials) {
  const double p = static_cast<double>(hits) / static_cast<double>(trials);
  return {p, std::sqrt(std::max(p * (1.0 - p), 1e-300) / static_cast<double>(trials))};
}

// Monte Carlo estimate of Pr{U_{k1:n1} > V_{k2:n2}} for Gaussian samples.
inline Proportion or_monte_carlo(double mu1, int k1, int n1, double mu2, int k2, int n2, double sigma,
                                 std::uint64_t trials, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z(0.0, sigma);
  std::vector<double> u(n1), v(n2);
  std::uint64_t hits = 0;
  for (std::uint64_t t = 0; t < trials; ++t) {
    for (auto& x : u) x = mu1 + z(rng);
    for (auto& x : v) x = mu2 + z(rng);
    hits += kth_largest(u, k1) > kth_largest(v, k2);
  }
  return proportion(hits, trials);
}

// (7,5) encoder written as explicit shift-register taps.
inline std::vector<std::uint8_t> encode_75(const std::vector<std::uint8_t>& in) {
  std::vector<std::uint8_t> out;
  int d1 = 0, d2 = 0;
  auto step = [&](int b) {
    out.push_back(static_cast<std::uint8_t>(b ^ d1 ^ d2));
    out.push_back(static_cast<std::uint8_t>(b ^ d2));
    d2 = d1;
    d1 = b;
  };
  for (auto b : in) step(b);
  step(0);
  step(0);
  return out;
}

}  // namespace oracle
