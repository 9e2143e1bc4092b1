#pragma once

// Reference implementations used only by tests. They are deliberately naive and
// share no code with the library.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <vector>

namespace oracle {

using Vec = std::vector<double>;

/// Minimum cost over every monotone warping path, found by explicit depth-first
/// enumeration (no memoization). Only for short inputs.
inline double dtw_exhaustive(const Vec& a, const Vec& b, std::optional<std::size_t> band = {}) {
  const std::size_t n = a.size(), m = b.size();
  double best = std::numeric_limits<double>::infinity();
  std::function<void(std::size_t, std::size_t, double)> walk = [&](std::size_t i, std::size_t j, double cost) {
    if (band && (i > j ? i - j : j - i) > *band) return;
    cost += std::abs(a[i] - b[j]);
    if (i == n - 1 && j == m - 1) {
      best = std::min(best, cost);
      return;
    }
    if (i + 1 < n) walk(i + 1, j, cost);
    if (j + 1 < m) walk(i, j + 1, cost);
    if (i + 1 < n && j + 1 < m) walk(i + 1, j + 1, cost);
  };
  walk(0, 0, 0.0);
  return best;
}

/// Full two-sided DFT by direct summation.
inline std::vector<std::complex<double>> naive_dft(const Vec& a) {
  const std::size_t n = a.size();
  std::vector<std::complex<double>> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    std::complex<double> acc{0.0, 0.0};
    for (std::size_t t = 0; t < n; ++t) {
      const double ang = -2.0 * std::numbers::pi * static_cast<double>((k * t) % n) / static_cast<double>(n);
      acc += a[t] * std::complex<double>(std::cos(ang), std::sin(ang));
    }
    out[k] = acc;
  }
  return out;
}

/// Mean SSIM with per-window two-pass moments.
inline double mean_ssim_direct(const Vec& a, const Vec& b, std::size_t win, double range) {
  const double c1 = std::pow(0.01 * range, 2), c2 = std::pow(0.03 * range, 2);
  double total = 0.0;
  const std::size_t positions = a.size() - win + 1;
  for (std::size_t p = 0; p < positions; ++p) {
    double ma = 0, mb = 0;
    for (std::size_t i = p; i < p + win; ++i) ma += a[i], mb += b[i];
    ma /= static_cast<double>(win);
    mb /= static_cast<double>(win);
    double va = 0, vb = 0, cov = 0;
    for (std::size_t i = p; i < p + win; ++i) {
      va += (a[i] - ma) * (a[i] - ma);
      vb += (b[i] - mb) * (b[i] - mb);
      cov += (a[i] - ma) * (b[i] - mb);
    }
    va /= static_cast<double>(win);
    vb /= static_cast<double>(win);
    cov /= static_cast<double>(win);
    total += (2 * ma * mb + c1) * (2 * cov + c2) / ((ma * ma + mb * mb + c1) * (va + vb + c2));
  }
  return total / static_cast<double>(positions);
}

/// L1 histogram distance by scanning explicit bin edges.
inline double histogram_l1_counting(const Vec& a, const Vec& b, std::size_t bins) {
  double lo = a[0], hi = a[0];
  for (const Vec* v : {&a, &b})
    for (double x : *v) lo = std::min(lo, x), hi = std::max(hi, x);
  if (hi == lo) return 0.0;
  std::vector<double> edges(bins + 1);
  for (std::size_t k = 0; k <= bins; ++k) edges[k] = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(bins);
  auto count = [&](const Vec& v) {
    std::vector<double> h(bins, 0.0);
    for (double x : v) {
      std::size_t k = 0;
      while (k + 1 < bins && x >= edges[k + 1]) ++k;
      h[k] += 1.0;
    }
    for (double& c : h) c /= static_cast<double>(v.size());
    return h;
  };
  const auto ha = count(a), hb = count(b);
  double d = 0.0;
  for (std::size_t k = 0; k < bins; ++k) d += std::abs(ha[k] - hb[k]);
  return d;
}

/// One-sample Kolmogorov-Smirnov statistic against U(lo, hi).
inline double ks_uniform(Vec xs, double lo, double hi) {
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double cdf = std::clamp((xs[i] - lo) / (hi - lo), 0.0, 1.0);
    d = std::max({d, static_cast<double>(i + 1) / n - cdf, cdf - static_cast<double>(i) / n});
  }
  return d;
}

/// Sign changes of the discrete derivative, ignoring exact zeros.
inline std::size_t derivative_sign_changes(const Vec& x) {
  std::size_t changes = 0;
  int last = 0;
  for (std::size_t i = 1; i < x.size(); ++i) {
    const double d = x[i] - x[i - 1];
    const int s = d > 0 ? 1 : (d < 0 ? -1 : 0);
    if (s != 0 && last != 0 && s != last) ++changes;
    if (s != 0) last = s;
  }
  return changes;
}

inline Vec min_max(const Vec& x, double lo, double hi) {
  const auto [mn, mx] = std::minmax_element(x.begin(), x.end());
  Vec out(x.size(), 0.0);
  if (*mx == *mn) return out;
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = lo + (hi - lo) * (x[i] - *mn) / (*mx - *mn);
  return out;
}

inline Vec random_vec(std::mt19937_64& g, std::size_t n, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Vec v(n);
  for (double& x : v) x = u(g);
  return v;
}

}  // namespace oracle
