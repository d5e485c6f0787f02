#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mignet/error.hpp"
#include "mignet/io.hpp"

namespace mignet {

struct KsResult {
  double d_statistic = 0.0;
  double p_value = 1.0;
  std::size_t n1 = 0;
  std::size_t n2 = 0;
};

/// Kolmogorov distribution tail Q(lambda) = 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 lambda^2).
/// Below lambda = 1.18 the alternating series cancels down to rounding noise,
/// so Q = 1 - K is taken from the equivalent theta-function form
/// K(lambda) = sqrt(2 pi) / lambda * sum_{k>=1} exp(-(2k-1)^2 pi^2 / (8 lambda^2)).
/// Both series stop once a term drops below 1e-12.
inline double kolmogorov_q(double lambda) {
  if (lambda <= 0.0) return 1.0;
  if (lambda < 1.18) {
    const double pi = std::numbers::pi;
    const double a = -pi * pi / (8.0 * lambda * lambda);
    double k_sum = 0.0;
    for (int k = 1; k <= 100; ++k) {
      const double odd = 2.0 * k - 1.0;
      const double term = std::exp(a * odd * odd);
      k_sum += term;
      if (term < 1e-12) break;
    }
    return std::clamp(1.0 - std::sqrt(2.0 * pi) / lambda * k_sum, 0.0, 1.0);
  }
  const double a = -2.0 * lambda * lambda;
  double sum = 0.0;
  double sign = 1.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = sign * 2.0 * std::exp(a * k * k);
    sum += term;
    if (std::abs(term) < 1e-12) break;
    sign = -sign;
  }
  return std::clamp(sum, 0.0, 1.0);
}

/// Two-sample KS test with the asymptotic p-value
/// Q((sqrt(ne) + 0.12 + 0.11 / sqrt(ne)) * D), ne = n1 n2 / (n1 + n2).
/// The CDF gap is evaluated after each distinct pooled value, so tied values
/// are consumed from both samples before comparing.
inline KsResult ks_two_sample(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw ValidationError("KS test needs two non-empty samples");
  std::vector<double> x(a.begin(), a.end()), y(b.begin(), b.end());
  for (double v : x)
    if (std::isnan(v)) throw ValidationError("KS test sample contains NaN");
  for (double v : y)
    if (std::isnan(v)) throw ValidationError("KS test sample contains NaN");
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double n1 = static_cast<double>(x.size());
  const double n2 = static_cast<double>(y.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < x.size() || j < y.size()) {
    double v;
    if (j == y.size() || (i < x.size() && x[i] <= y[j]))
      v = x[i];
    else
      v = y[j];
    while (i < x.size() && x[i] == v) ++i;
    while (j < y.size() && y[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / n1 - static_cast<double>(j) / n2));
  }
  KsResult r;
  r.d_statistic = d;
  r.n1 = x.size();
  r.n2 = y.size();
  const double ne = n1 * n2 / (n1 + n2);
  const double root = std::sqrt(ne);
  r.p_value = kolmogorov_q((root + 0.12 + 0.11 / root) * d);
  return r;
}

struct Summary {
  std::size_t count = 0;
  std::optional<double> mean;
  std::optional<double> min;
  std::optional<double> max;
};

inline Summary summarize(std::span<const double> values) {
  Summary s;
  s.count = values.size();
  if (values.empty()) return s;
  double total = 0.0;
  double lo = values.front(), hi = values.front();
  for (double v : values) {
    total += v;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  s.mean = total / static_cast<double>(values.size());
  s.min = lo;
  s.max = hi;
  return s;
}

/// Summaries for each group, keyed like the input.
template <typename Key>
std::vector<std::pair<Key, Summary>> group_summary(const std::vector<std::pair<Key, std::vector<double>>>& groups) {
  std::vector<std::pair<Key, Summary>> out;
  out.reserve(groups.size());
  for (const auto& [key, values] : groups) out.emplace_back(key, summarize(values));
  return out;
}

struct Histogram {
  std::vector<double> edges;  // bins + 1 edges, in the value domain
  std::vector<std::size_t> counts;
  bool log_x = false;

  std::size_t total() const {
    std::size_t t = 0;
    for (auto c : counts) t += c;
    return t;
  }
};

/// Equal-width bins over [range.first, range.second], linear or log10. The
/// range defaults to the data's min/max. Values outside an explicit range are
/// clamped into the end bins; the top edge is inclusive.
inline Histogram histogram(std::span<const double> values, std::size_t bins, bool log_x = false,
                           std::optional<std::pair<double, double>> range = std::nullopt) {
  if (bins < 1) throw ValidationError("histogram needs at least one bin");
  if (log_x) {
    std::vector<double> bad;
    for (double v : values)
      if (!(v > 0.0)) bad.push_back(v);
    if (!bad.empty() || (range && !(range->first > 0.0 && range->second > 0.0))) {
      std::string msg = "log-scale histogram requires strictly positive values; offenders:";
      for (std::size_t k = 0; k < std::min<std::size_t>(bad.size(), 10); ++k) msg += " " + format_double(bad[k]);
      if (bad.size() > 10) msg += " ... (" + std::to_string(bad.size()) + " total)";
      throw ValidationError(msg);
    }
  }
  auto fwd = [&](double v) { return log_x ? std::log10(v) : v; };
  auto inv = [&](double v) { return log_x ? std::pow(10.0, v) : v; };

  double lo, hi;
  if (range) {
    lo = fwd(range->first);
    hi = fwd(range->second);
  } else if (values.empty()) {
    lo = fwd(log_x ? 1.0 : 0.0);
    hi = lo + 1.0;
  } else {
    auto [mn, mx] = std::minmax_element(values.begin(), values.end());
    lo = fwd(*mn);
    hi = fwd(*mx);
  }
  if (!(hi > lo)) hi = lo + 1.0;

  Histogram h;
  h.log_x = log_x;
  h.counts.assign(bins, 0);
  h.edges.resize(bins + 1);
  const double width = (hi - lo) / static_cast<double>(bins);
  for (std::size_t k = 0; k <= bins; ++k) h.edges[k] = inv(lo + width * static_cast<double>(k));
  h.edges.back() = inv(hi);
  for (double v : values) {
    double pos = (fwd(v) - lo) / width;
    std::size_t k = pos <= 0.0 ? 0 : static_cast<std::size_t>(pos);
    ++h.counts[std::min(k, bins - 1)];
  }
  return h;
}

/// Pearson correlation; nullopt when either vector is constant or the
/// lengths differ or are < 2.
inline std::optional<double> pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) return std::nullopt;
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double dx = x[i] - mx, dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx <= 0.0 || syy <= 0.0) return std::nullopt;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

}  // namespace mignet
