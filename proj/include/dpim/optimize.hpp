#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "dpim/error.hpp"
#include "dpim/signal.hpp"

namespace dpim {

struct ScalarMinimum {
  double x = 0.0;
  double value = 0.0;
  int evaluations = 0;
};

/// Golden-section search for a minimum of f on [a, b], stopping once the
/// bracket is narrower than tol.
template <class F>
ScalarMinimum golden_section(F&& f, double a, double b, double tol) {
  require(b > a, "golden-section bracket must be non-empty");
  require(tol > 0.0, "golden-section tolerance must be positive");
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  int evals = 2;
  while (b - a > tol) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
    ++evals;
  }
  return fc <= fd ? ScalarMinimum{c, fc, evals} : ScalarMinimum{d, fd, evals};
}

struct GridScan {
  std::vector<double> x;
  std::vector<double> value;
  std::size_t best = 0;

  bool flat() const {
    const auto [lo, hi] = std::minmax_element(value.begin(), value.end());
    return *hi - *lo <= 1e-15 * std::max(1.0, std::fabs(*hi));
  }
};

/// Evaluates f at `points` equally spaced abscissae covering [a, b].
template <class F>
GridScan grid_scan(F&& f, double a, double b, int points) {
  require(points >= 2, "grid scan needs at least two points");
  GridScan g;
  for (int i = 0; i < points; ++i) {
    const double x = a + (b - a) * i / (points - 1);
    g.x.push_back(x);
    g.value.push_back(f(x));
    if (g.value.back() < g.value[g.best]) g.best = g.x.size() - 1;
  }
  return g;
}

struct BarrierOptimum {
  BarrierSpec barrier{};
  double objective = 0.0;
  double grid_low = 0.0;       // best A_L of the confirming scan
  double grid_objective = 0.0;
  bool grid_agrees = true;     // golden-section and scan minima within tol
  int evaluations = 0;
};

inline constexpr int kBarrierGridPoints = 200;

/// Minimizes objective(BarrierSpec) over A_L in (εA, A − εA), ε = 1e-4, with
/// A_H tied to A_L by the power constraint. A golden-section pass over the
/// whole range is checked against a grid scan; if the scan finds a better
/// basin the search is repeated inside it. A flat objective returns A/2.
template <class Objective>
BarrierOptimum optimize_barrier(int period, double average, Objective&& objective, double tol = 1e-3,
                                int grid_points = kBarrierGridPoints) {
  require(period >= 2, "barrier period K must be >= 2");
  require(average > 0.0, "average amplitude must be positive");
  require(tol > 0.0, "optimizer tolerance must be positive");
  const double eps = 1e-4 * average;
  const double lo = eps, hi = average - eps;
  int evals = 0;
  auto f = [&](double low) {
    ++evals;
    return static_cast<double>(objective(BarrierSpec::from_low(period, average, low)));
  };

  const auto grid = grid_scan(f, lo, hi, grid_points);
  BarrierOptimum out;
  if (grid.flat()) {
    out.barrier = BarrierSpec::from_low(period, average, 0.5 * average);
    out.objective = grid.value.front();
    out.grid_low = out.barrier.low;
    out.grid_objective = out.objective;
    out.evaluations = evals;
    return out;
  }
  auto best = golden_section(f, lo, hi, tol);
  out.grid_low = grid.x[grid.best];
  out.grid_objective = grid.value[grid.best];
  out.grid_agrees = std::fabs(best.x - out.grid_low) <= tol + (hi - lo) / (grid_points - 1) ||
                    best.value <= out.grid_objective;
  if (out.grid_objective < best.value) {
    const double a = grid.x[grid.best > 0 ? grid.best - 1 : 0];
    const double b = grid.x[std::min(grid.best + 1, grid.x.size() - 1)];
    const auto local = golden_section(f, a, b, tol);
    best = local.value <= out.grid_objective ? local : ScalarMinimum{out.grid_low, out.grid_objective, 0};
  }
  out.barrier = BarrierSpec::from_low(period, average, best.x);
  out.objective = best.value;
  out.evaluations = evals;
  return out;
}

/// Monte Carlo BER at one SNR with its 95% half-width.
struct ThresholdProbe {
  double snr_db = 0.0;
  double ber = 0.0;
  double ci = 0.0;
};

struct ThresholdResult {
  double snr_db = 0.0;
  bool resolved = true;  // false when stopped because the CI straddled the target
  std::vector<ThresholdProbe> trace;
};

inline constexpr double kThresholdWindowDb = 0.1;

/// Bisection for the SNR at which BER falls to `target`. Each probe's CI must
/// exclude the target for the bracket to move; the search ends when the
/// bracket is narrower than min_window_db or a probe cannot be resolved. The
/// returned SNR interpolates log10(BER) across the final bracket.
template <class Probe>
ThresholdResult snr_threshold_search(Probe&& probe, double target, double lo_db, double hi_db,
                                     double min_window_db = kThresholdWindowDb) {
  require(target > 0.0 && target < 0.5, "target BER must lie in (0, 0.5)");
  require(hi_db > lo_db, "SNR window must be non-empty");
  ThresholdResult out;
  auto run = [&](double snr) {
    ThresholdProbe p = probe(snr);
    p.snr_db = snr;
    out.trace.push_back(p);
    return p;
  };
  ThresholdProbe lo = run(lo_db), hi = run(hi_db);
  if (!(lo.ber > target && hi.ber < target))
    throw NumericalError("target BER is not bracketed by the SNR window");
  while (hi.snr_db - lo.snr_db > min_window_db) {
    const auto mid = run(0.5 * (lo.snr_db + hi.snr_db));
    if (mid.ber - mid.ci > target) {
      lo = mid;
    } else if (mid.ber + mid.ci < target) {
      hi = mid;
    } else {
      out.resolved = false;
      out.snr_db = mid.snr_db;
      return out;
    }
  }
  if (lo.ber > 0.0 && hi.ber > 0.0) {
    const double a = std::log10(lo.ber), b = std::log10(hi.ber), t = std::log10(target);
    out.snr_db = lo.snr_db + (hi.snr_db - lo.snr_db) * (a - t) / (a - b);
  } else {
    out.snr_db = 0.5 * (lo.snr_db + hi.snr_db);
  }
  return out;
}

}  // namespace dpim
