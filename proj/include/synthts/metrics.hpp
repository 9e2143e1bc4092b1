#pragma once

/**
 * @file metrics.hpp
 * @brief Reconstruction metrics (SDL, DTW, DH, MSE) and the one-sided DFT
 * magnitude spectrum.
 *
 * Frozen conventions, recorded alongside every MetricsReport:
 *   - DTW: local cost |a_i - b_j|, no path-length normalization, optional
 *     Sakoe-Chiba band |i - j| <= band.
 *   - DH: L1 distance of sum-normalized, equal-width histograms over the shared
 *     range of both inputs; result in [0, 2].
 *   - SDL: 1 - mean SSIM over all full sliding windows of odd width `win`,
 *     uniform weights, population moments, C1 = (0.01 L)^2, C2 = (0.03 L)^2.
 */

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <fftw3.h>

#include "synthts/core_types.hpp"
#include "synthts/errors.hpp"

namespace synthts {

struct MetricConfig {
  std::size_t bins = 32;
  std::size_t win = 11;
  std::optional<std::size_t> band;
  double dynamic_range = 2.0;
};

struct MetricsReport {
  double sdl = 0.0;
  double dtw = 0.0;
  double dh = 0.0;
  double mse = 0.0;
};

inline double mse(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ShapeMismatch("mse needs equal lengths");
  if (a.empty()) return 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return acc / static_cast<double>(a.size());
}

inline double dtw(std::span<const double> a, std::span<const double> b, std::optional<std::size_t> band = {}) {
  if (a.empty() || b.empty()) throw InvalidSeries("dtw of an empty series");
  const std::size_t n = a.size(), m = b.size();
  const std::size_t gap = n > m ? n - m : m - n;
  if (band && *band < gap)
    throw BandInfeasible("band " + std::to_string(*band) + " cannot connect corners of a " + std::to_string(n) + "x" +
                         std::to_string(m) + " table");

  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> prev(m + 1, inf), cur(m + 1, inf);
  prev[0] = 0.0;
  for (std::size_t i = 1; i <= n; ++i) {
    std::fill(cur.begin(), cur.end(), inf);
    std::size_t j_lo = 1, j_hi = m;
    if (band) {
      j_lo = i > *band ? std::max<std::size_t>(1, i - *band) : 1;
      j_hi = std::min(m, i + *band);
    }
    for (std::size_t j = j_lo; j <= j_hi; ++j) {
      const double best = std::min({prev[j - 1], prev[j], cur[j - 1]});
      cur[j] = std::abs(a[i - 1] - b[j - 1]) + best;
    }
    std::swap(prev, cur);
  }
  return prev[m];
}

inline double histogram_distance(std::span<const double> a, std::span<const double> b, std::size_t bins = 32) {
  if (bins < 2) throw ConfigError("histogram needs at least 2 bins");
  if (a.empty() || b.empty()) throw InvalidSeries("histogram of an empty series");
  if (!all_finite(a) || !all_finite(b)) throw InvalidSeries("non-finite sample");
  const auto [amin, amax] = std::minmax_element(a.begin(), a.end());
  const auto [bmin, bmax] = std::minmax_element(b.begin(), b.end());
  const double lo = std::min(*amin, *bmin);
  const double hi = std::max(*amax, *bmax);
  if (!(hi > lo)) return 0.0;

  auto histogram = [&](std::span<const double> xs) {
    std::vector<double> h(bins, 0.0);
    for (double x : xs) {
      auto idx = static_cast<std::size_t>((x - lo) / (hi - lo) * static_cast<double>(bins));
      h[std::min(idx, bins - 1)] += 1.0;
    }
    for (double& v : h) v /= static_cast<double>(xs.size());
    return h;
  };
  const auto ha = histogram(a);
  const auto hb = histogram(b);
  double d = 0.0;
  for (std::size_t k = 0; k < bins; ++k) d += std::abs(ha[k] - hb[k]);
  return d;
}

/// Mean SSIM over sliding windows; see file comment for the exact form.
inline double mean_ssim(std::span<const double> a, std::span<const double> b, std::size_t win = 11,
                        double dynamic_range = 2.0) {
  if (a.size() != b.size()) throw ShapeMismatch("ssim needs equal lengths");
  if (win == 0 || win % 2 == 0) throw InvalidWindow("ssim window must be odd");
  if (win > a.size()) throw InvalidWindow("ssim window longer than series");
  const std::size_t n = a.size();
  const double c1 = (0.01 * dynamic_range) * (0.01 * dynamic_range);
  const double c2 = (0.03 * dynamic_range) * (0.03 * dynamic_range);

  std::vector<double> sa(n + 1, 0.0), sb(n + 1, 0.0), saa(n + 1, 0.0), sbb(n + 1, 0.0), sab(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    sa[i + 1] = sa[i] + a[i];
    sb[i + 1] = sb[i] + b[i];
    saa[i + 1] = saa[i] + a[i] * a[i];
    sbb[i + 1] = sbb[i] + b[i] * b[i];
    sab[i + 1] = sab[i] + a[i] * b[i];
  }
  const double w = static_cast<double>(win);
  const std::size_t positions = n - win + 1;
  double total = 0.0;
  for (std::size_t p = 0; p < positions; ++p) {
    const double mu_a = (sa[p + win] - sa[p]) / w;
    const double mu_b = (sb[p + win] - sb[p]) / w;
    const double var_a = (saa[p + win] - saa[p]) / w - mu_a * mu_a;
    const double var_b = (sbb[p + win] - sbb[p]) / w - mu_b * mu_b;
    const double cov = (sab[p + win] - sab[p]) / w - mu_a * mu_b;
    total += ((2.0 * mu_a * mu_b + c1) * (2.0 * cov + c2)) /
             ((mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2));
  }
  return total / static_cast<double>(positions);
}

inline double structural_dissimilarity(std::span<const double> a, std::span<const double> b, std::size_t win = 11,
                                       double dynamic_range = 2.0) {
  return 1.0 - mean_ssim(a, b, win, dynamic_range);
}

namespace detail {

// FFTW's planner is not thread-safe; execution on distinct plans is.
inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace detail

/// One-sided DFT: bins 0..floor(N/2); bin k is k/N cycles per sample.
inline std::vector<std::complex<double>> dft_one_sided(std::span<const double> a) {
  if (a.empty()) throw InvalidSeries("dft of an empty series");
  const int n = static_cast<int>(a.size());
  const std::size_t bins = a.size() / 2 + 1;
  std::vector<double> in(a.begin(), a.end());
  std::vector<std::complex<double>> out(bins);
  fftw_plan plan;
  {
    std::lock_guard lock(detail::fftw_planner_mutex());
    plan = fftw_plan_dft_r2c_1d(n, in.data(), reinterpret_cast<fftw_complex*>(out.data()), FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard lock(detail::fftw_planner_mutex());
    fftw_destroy_plan(plan);
  }
  return out;
}

inline std::vector<double> dft_magnitude(std::span<const double> a) {
  const auto spec = dft_one_sided(a);
  std::vector<double> mag(spec.size());
  std::transform(spec.begin(), spec.end(), mag.begin(), [](const auto& z) { return std::abs(z); });
  return mag;
}

inline MetricsReport evaluate(std::span<const double> pred, std::span<const double> truth,
                              const MetricConfig& config = {}) {
  MetricsReport r;
  r.sdl = structural_dissimilarity(pred, truth, config.win, config.dynamic_range);
  r.dtw = dtw(pred, truth, config.band);
  r.dh = histogram_distance(pred, truth, config.bins);
  r.mse = mse(pred, truth);
  return r;
}

}  // namespace synthts
