#pragma once

#include <gsl/gsl_errno.h>
#include <gsl/gsl_sf_zeta.h>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "mignet/error.hpp"

namespace mignet {

struct PowerLawFit {
  double alpha = 0.0;
  std::size_t xmin = 0;
  double ks_distance = 1.0;
  std::size_t n_tail = 0;
  bool small_tail = false;  // fewer than 50 samples at or above xmin
};

namespace detail {

/// Hurwitz zeta sum_{k>=0} (k + q)^{-s}, with GSL's error handler silenced.
inline double hurwitz_zeta(double s, double q) {
  gsl_sf_result r;
  gsl_error_handler_t* old = gsl_set_error_handler_off();
  int status = gsl_sf_hzeta_e(s, q, &r);
  gsl_set_error_handler(old);
  if (status != GSL_SUCCESS) return std::nan("");
  return r.val;
}

/// Approximate discrete MLE: 1 + n / sum ln(x / (xmin - 1/2)).
inline double approx_alpha(double log_sum, std::size_t n, double xmin) {
  return 1.0 + static_cast<double>(n) / (log_sum - static_cast<double>(n) * std::log(xmin - 0.5));
}

/// Largest gap between the empirical CDF of a sorted tail and the discrete
/// power law P(X <= x) = 1 - zeta(alpha, x + 1) / zeta(alpha, xmin).
inline double tail_ks(std::span<const std::size_t> tail, double alpha, std::size_t xmin) {
  const double norm = hurwitz_zeta(alpha, static_cast<double>(xmin));
  const double n = static_cast<double>(tail.size());
  double d = 0.0;
  for (std::size_t i = 0; i < tail.size();) {
    std::size_t j = i;
    while (j < tail.size() && tail[j] == tail[i]) ++j;
    const double x = static_cast<double>(tail[i]);
    const double model_le = 1.0 - hurwitz_zeta(alpha, x + 1.0) / norm;
    const double model_lt = 1.0 - hurwitz_zeta(alpha, x) / norm;
    const double emp_le = static_cast<double>(j) / n;
    const double emp_lt = static_cast<double>(i) / n;
    d = std::max({d, std::abs(emp_le - model_le), std::abs(emp_lt - model_lt)});
    i = j;
  }
  return d;
}

}  // namespace detail

/// Discrete power-law fit following the Clauset-Shalizi-Newman recipe: for
/// every candidate xmin the exponent is the approximate MLE, and the xmin
/// whose fitted tail has the smallest KS distance is kept (ties: smaller
/// xmin). Zero degrees are ignored. A tail must hold at least two distinct
/// values; inputs without such a tail are rejected.
inline PowerLawFit fit_power_law(std::span<const std::size_t> values) {
  std::vector<std::size_t> x;
  x.reserve(values.size());
  for (auto v : values)
    if (v > 0) x.push_back(v);
  std::sort(x.begin(), x.end());
  if (x.empty() || x.front() == x.back())
    throw NumericError("power-law fit rejected: degenerate sample (fewer than two distinct positive values)");

  // Suffix sums of ln(x) for O(1) per-candidate exponents.
  std::vector<double> suffix_log(x.size() + 1, 0.0);
  for (std::size_t i = x.size(); i-- > 0;) suffix_log[i] = suffix_log[i + 1] + std::log(static_cast<double>(x[i]));

  PowerLawFit best;
  bool have = false;
  for (std::size_t start = 0; start < x.size();) {
    const std::size_t xmin = x[start];
    if (xmin == x.back()) break;  // one distinct value left
    const std::size_t n = x.size() - start;
    const double alpha = detail::approx_alpha(suffix_log[start], n, static_cast<double>(xmin));
    if (std::isfinite(alpha) && alpha > 1.0) {
      const double ks = detail::tail_ks(std::span<const std::size_t>(x).subspan(start), alpha, xmin);
      if (std::isfinite(ks) && (!have || ks < best.ks_distance)) {
        best = {alpha, xmin, ks, n, n < 50};
        have = true;
      }
    }
    while (start < x.size() && x[start] == xmin) ++start;
  }
  if (!have) throw NumericError("power-law fit rejected: no admissible xmin");
  return best;
}

}  // namespace mignet
