#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

#include "dpim/error.hpp"
#include "dpim/quadrature.hpp"
#include "dpim/special.hpp"

namespace dpim {

/// Base-distribution value at a point, carried as the pair (F, 1 − F) so that
/// both tails stay accurate.
struct CdfPair {
  double cdf;
  double sf;
};

/// Gaussian N(mean, sigma^2) evaluated at v.
inline CdfPair gaussian_cdf_pair(double v, double mean, double sigma) {
  const double z = (v - mean) / sigma;
  return {normal_cdf(z), q_function(z)};
}

namespace detail {

inline constexpr int kDirectSumLimit = 50;

inline double log_choose(int n, int j) {
  return std::lgamma(n + 1.0) - std::lgamma(j + 1.0) - std::lgamma(n - j + 1.0);
}

// Σ_{j=lo}^{hi} C(n, j) p^j q^(n−j), with p + q = 1 supplied separately.
inline double binomial_range(int n, int lo, int hi, double p, double q) {
  lo = std::max(lo, 0);
  hi = std::min(hi, n);
  if (lo > hi) return 0.0;
  if (p <= 0.0) return lo == 0 ? 1.0 : 0.0;
  if (q <= 0.0) return hi == n ? 1.0 : 0.0;
  if (n <= kDirectSumLimit) {
    double coeff = std::exp(log_choose(n, lo));
    double sum = 0.0;
    for (int j = lo; j <= hi; ++j) {
      sum += coeff * std::pow(p, j) * std::pow(q, n - j);
      coeff = coeff * (n - j) / (j + 1);
    }
    return std::min(sum, 1.0);
  }
  // Log-space accumulation for large n with a running maximum.
  const double lp = std::log(p), lq = std::log(q);
  double log_c = log_choose(n, lo);
  double peak = -std::numeric_limits<double>::infinity();
  double sum = 0.0;
  for (int j = lo; j <= hi; ++j) {
    const double t = log_c + j * lp + (n - j) * lq;
    if (t > peak) {
      sum = sum * std::exp(peak - t) + 1.0;
      peak = t;
    } else {
      sum += std::exp(t - peak);
    }
    log_c += std::log(static_cast<double>(n - j)) - std::log(j + 1.0);
  }
  if (peak == -std::numeric_limits<double>::infinity()) return 0.0;
  return std::min(std::exp(peak + std::log(sum)), 1.0);
}

inline void check_rank(int k, int n) { require(n >= 1 && k >= 1 && k <= n, "order-statistic rank needs 1 <= k <= n"); }

inline double log_of(double p, double complement) { return p < 0.5 ? std::log(p) : std::log1p(-complement); }

// Extreme ranks in closed form: the maximum (k = 1) is below v iff all n
// draws are, the minimum (k = n) iff at least one is.
inline bool extreme_rank(CdfPair base, int k, int n, double& cdf, double& sf) {
  if (k == 1) {
    const double l = log_of(base.cdf, base.sf);
    cdf = std::exp(n * l);
    sf = -std::expm1(n * l);
    return true;
  }
  if (k == n) {
    const double l = log_of(base.sf, base.cdf);
    sf = std::exp(n * l);
    cdf = -std::expm1(n * l);
    return true;
  }
  return false;
}

}  // namespace detail

/// CDF of the k-th largest of n i.i.d. draws:
///   Σ_{j=n+1−k}^{n} C(n,j) F^j (1−F)^{n−j}.
inline double order_stat_cdf(CdfPair base, int k, int n) {
  detail::check_rank(k, n);
  double cdf, sf;
  if (detail::extreme_rank(base, k, n, cdf, sf)) return cdf;
  return detail::binomial_range(n, n + 1 - k, n, base.cdf, base.sf);
}

/// 1 − CDF of the k-th largest, summed directly (no cancellation).
inline double order_stat_sf(CdfPair base, int k, int n) {
  detail::check_rank(k, n);
  double cdf, sf;
  if (detail::extreme_rank(base, k, n, cdf, sf)) return sf;
  return detail::binomial_range(n, 0, n - k, base.cdf, base.sf);
}

namespace detail {

// log of n!/((n−k)!(k−1)!)
inline double order_stat_log_coeff(int k, int n) {
  return std::lgamma(n + 1.0) - std::lgamma(n - k + 1.0) - std::lgamma(static_cast<double>(k));
}

inline double order_stat_pdf(CdfPair base, double base_pdf, int k, int n, double log_coeff) {
  if (base_pdf <= 0.0) return 0.0;
  if ((n - k > 0 && base.cdf <= 0.0) || (k > 1 && base.sf <= 0.0)) return 0.0;
  const double log_f = log_coeff + (n - k > 0 ? (n - k) * std::log(base.cdf) : 0.0) +
                       (k > 1 ? (k - 1) * std::log(base.sf) : 0.0) + std::log(base_pdf);
  return std::exp(log_f);
}

}  // namespace detail

/// Density of the k-th largest of n:
///   n!/((n−k)!(k−1)!) F^{n−k} (1−F)^{k−1} f.
inline double order_stat_pdf(CdfPair base, double base_pdf, int k, int n) {
  detail::check_rank(k, n);
  return detail::order_stat_pdf(base, base_pdf, k, n, detail::order_stat_log_coeff(k, n));
}

/// Callable forms taking the base CDF as a function of v.
template <class Cdf>
double order_stat_cdf(const Cdf& base_cdf, int k, int n, double v) {
  const double f = base_cdf(v);
  return order_stat_cdf(CdfPair{f, 1.0 - f}, k, n);
}

template <class Cdf, class Pdf>
double order_stat_pdf(const Cdf& base_cdf, const Pdf& base_pdf, int k, int n, double v) {
  const double f = base_cdf(v);
  return order_stat_pdf(CdfPair{f, 1.0 - f}, base_pdf(v), k, n);
}

/// Pr{U_{k1:n1} > V_{k2:n2}}: U is the k1-th largest of n1 draws from
/// N(mu1, sigma^2), V the k2-th largest of n2 draws from N(mu2, sigma^2);
/// sigma = σ_n / h.
struct OrQuery {
  double mu1 = 0.0;
  int k1 = 1;
  int n1 = 1;
  double mu2 = 1.0;
  int k2 = 1;
  int n2 = 1;
  double sigma = 1.0;

  void validate() const {
    detail::check_rank(k1, n1);
    detail::check_rank(k2, n2);
    require(sigma > 0.0, "OR query needs sigma > 0");
  }
};

enum class BoundMode { exact, tractable };

struct BoundResult {
  double value = 0.0;
  BoundMode mode = BoundMode::exact;
  double quadrature_error = 0.0;
  bool clamped = false;  // raw value fell outside [0, 1] by quadrature error
};

inline BoundResult clamp_probability(BoundResult r) {
  if (r.value < 0.0 || r.value > 1.0) {
    r.clamped = true;
    r.value = std::clamp(r.value, 0.0, 1.0);
  }
  return r;
}

inline constexpr double kOrAbsTolerance = 1e-10;
inline constexpr double kOrSpanSigmas = 10.0;

/// ∫ [1 − F_{U_{k1:n1}}(v)] f_{V_{k2:n2}}(v) dv by adaptive Gauss–Kronrod over
/// [min μ − 10σ, max μ + 10σ].
inline BoundResult or_exact(const OrQuery& q) {
  q.validate();
  const double lo = std::min(q.mu1, q.mu2) - kOrSpanSigmas * q.sigma;
  const double hi = std::max(q.mu1, q.mu2) + kOrSpanSigmas * q.sigma;
  const double log_coeff = detail::order_stat_log_coeff(q.k2, q.n2);
  auto integrand = [&](double v) {
    const double density = detail::order_stat_pdf(gaussian_cdf_pair(v, q.mu2, q.sigma),
                                                  normal_pdf((v - q.mu2) / q.sigma) / q.sigma, q.k2, q.n2, log_coeff);
    if (density == 0.0) return 0.0;
    return order_stat_sf(gaussian_cdf_pair(v, q.mu1, q.sigma), q.k1, q.n1) * density;
  };
  const int pieces = std::max(16, static_cast<int>(std::ceil((hi - lo) / q.sigma)));
  const auto r = integrate_adaptive(integrand, lo, hi, kOrAbsTolerance, 0.0, pieces);
  if (!r.converged) throw NumericalError("OR quadrature did not converge");
  return clamp_probability({r.value, BoundMode::exact, r.abs_error});
}

inline constexpr double kMinimumQuantileLevel = 0.5264;

/// E(V_{n:n}) ≈ A − (σ_n/h) Φ^{-1}(0.5264^{1/N_s}): mean of the smallest of
/// N_s Gaussian samples with mean A.
inline double extreme_order_stat_mean(int count, double amplitude, double sigma_n, double h) {
  require(count >= 1, "extreme order statistic needs N_s >= 1");
  if (sigma_n == 0.0) return amplitude;
  return amplitude - sigma_n / h * normal_quantile(std::pow(kMinimumQuantileLevel, 1.0 / count));
}

/// E(V_{k:n}) for N(mean, sigma^2) samples by quadrature (any rank).
inline double order_stat_mean(double mean, double sigma, int k, int n) {
  detail::check_rank(k, n);
  auto integrand = [&](double z) {
    return z * order_stat_pdf(gaussian_cdf_pair(z, 0.0, 1.0), normal_pdf(z), k, n);
  };
  const auto r = integrate_adaptive(integrand, -12.0, 12.0, 1e-12, 0.0, 48);
  return mean + sigma * r.value;
}

/// Threshold approximation of OR: 1 − F_{U_{k1:n1}}(α·E(V_{k2:n2})). The
/// minimum (k2 = n2) uses the closed-form mean; other ranks integrate.
inline BoundResult or_approx(const OrQuery& q, double alpha) {
  q.validate();
  require(alpha > 0.0 && alpha <= 1.0, "alpha must lie in (0, 1]");
  const double mean_v = q.k2 == q.n2 ? extreme_order_stat_mean(q.n2, q.mu2, q.sigma, 1.0)
                                     : order_stat_mean(q.mu2, q.sigma, q.k2, q.n2);
  const double value = order_stat_sf(gaussian_cdf_pair(alpha * mean_v, q.mu1, q.sigma), q.k1, q.n1);
  return clamp_probability({value, BoundMode::tractable, 0.0});
}

}  // namespace dpim
