#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <span>
#include <vector>

#include "dpim/error.hpp"

namespace dpim {

struct QuadratureResult {
  double value = 0.0;
  double abs_error = 0.0;
  int intervals = 0;
  bool converged = false;
};

namespace detail {

// 15-point Kronrod nodes on [0, 1]; odd entries are shared with the 7-point Gauss rule.
inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a, b, value, error;
  bool at_roundoff = false;
  bool operator<(const Panel& other) const { return error < other.error; }
};

// G7-K15 on [a, b] with the QUADPACK error heuristic.
template <class F>
Panel gauss_kronrod_15(F& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double kronrod = fc * kKronrodWeights[7];
  double gauss = fc * kGaussWeights[3];
  double abs_sum = std::fabs(kronrod);
  std::array<double, 7> f1{}, f2{};
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kKronrodNodes[j];
    f1[j] = f(center - dx);
    f2[j] = f(center + dx);
    kronrod += kKronrodWeights[j] * (f1[j] + f2[j]);
    abs_sum += kKronrodWeights[j] * (std::fabs(f1[j]) + std::fabs(f2[j]));
    if (j % 2 == 1) gauss += kGaussWeights[j / 2] * (f1[j] + f2[j]);
  }
  const double mean = 0.5 * kronrod;
  double asc = kKronrodWeights[7] * std::fabs(fc - mean);
  for (int j = 0; j < 7; ++j)
    asc += kKronrodWeights[j] * (std::fabs(f1[j] - mean) + std::fabs(f2[j] - mean));

  const double value = kronrod * half;
  asc *= std::fabs(half);
  double error = std::fabs((kronrod - gauss) * half);
  if (asc != 0.0 && error != 0.0) error = asc * std::min(1.0, std::pow(200.0 * error / asc, 1.5));
  const double round_off = 50.0 * std::numeric_limits<double>::epsilon() * abs_sum * std::fabs(half);
  const bool at_roundoff = round_off > std::numeric_limits<double>::min() && error <= round_off;
  if (at_roundoff) error = round_off;
  return {a, b, value, error, at_roundoff};
}

}  // namespace detail

/// Globally adaptive Gauss–Kronrod integration. The initial partition is given
/// by `breakpoints` (sorted, at least two points); the panel with the largest
/// error estimate is bisected until the total error is below
/// max(abs_tol, rel_tol * |value|) or the panel budget is exhausted.
template <class F>
QuadratureResult integrate_adaptive(F&& f, std::span<const double> breakpoints, double abs_tol,
                                    double rel_tol = 0.0, int max_panels = 4000) {
  require(breakpoints.size() >= 2, "quadrature needs at least one interval");
  std::priority_queue<detail::Panel> heap;
  double value = 0.0, error = 0.0;
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    auto p = detail::gauss_kronrod_15(f, breakpoints[i], breakpoints[i + 1]);
    value += p.value;
    error += p.error;
    heap.push(p);
  }
  auto done = [&] { return error <= std::max(abs_tol, rel_tol * std::fabs(value)); };
  while (!done() && static_cast<int>(heap.size()) < max_panels) {
    const auto worst = heap.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (worst.at_roundoff || !(mid > worst.a && mid < worst.b)) break;  // nothing left to refine
    heap.pop();
    const auto left = detail::gauss_kronrod_15(f, worst.a, mid);
    const auto right = detail::gauss_kronrod_15(f, mid, worst.b);
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
  }
  // Re-sum to shed the drift of the running updates.
  value = 0.0;
  error = 0.0;
  const int panels = static_cast<int>(heap.size());
  while (!heap.empty()) {
    value += heap.top().value;
    error += heap.top().error;
    heap.pop();
  }
  return {value, error, panels, error <= std::max(abs_tol, rel_tol * std::fabs(value))};
}

/// Convenience overload: [a, b] pre-split into `pieces` equal panels.
template <class F>
QuadratureResult integrate_adaptive(F&& f, double a, double b, double abs_tol, double rel_tol = 0.0,
                                    int pieces = 1, int max_panels = 4000) {
  std::vector<double> edges(static_cast<std::size_t>(pieces) + 1);
  for (int i = 0; i <= pieces; ++i) edges[i] = a + (b - a) * i / pieces;
  edges.back() = b;
  return integrate_adaptive(std::forward<F>(f), std::span<const double>(edges), abs_tol, rel_tol,
                            max_panels);
}

}  // namespace dpim
