#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "synthts/errors.hpp"

namespace synthts {

inline constexpr const char* kEngineVersion = "1.0.0";

/// Smallest window length the generators accept.
inline constexpr std::size_t kMinWindowLen = 8;

/// Sample period. Fixed: one sample per unit time.
inline constexpr double kSamplePeriod = 1.0;

/// One univariate window of samples.
using SeriesWindow = std::vector<double>;

/// Mixing weights for rhythm, noise and trend. Components are non-negative and
/// sum to one.
struct MixRatios {
  double rhythm = 1.0;
  double noise = 0.0;
  double trend = 0.0;

  double sum() const noexcept { return rhythm + noise + trend; }
  bool operator==(const MixRatios&) const = default;
};

inline bool all_finite(std::span<const double> xs) noexcept {
  return std::all_of(xs.begin(), xs.end(), [](double v) { return std::isfinite(v); });
}

namespace detail {

/// Affine map of [min, max] onto [lo, hi]; constant input maps to `flat`.
inline SeriesWindow rescale(std::span<const double> xs, double lo, double hi, double flat) {
  if (!all_finite(xs)) throw InvalidSeries("non-finite sample in series");
  SeriesWindow out(xs.size(), flat);
  if (xs.empty()) return out;
  const auto [mn_it, mx_it] = std::minmax_element(xs.begin(), xs.end());
  const double mn = *mn_it;
  const double range = *mx_it - mn;
  if (range == 0.0) return out;
  const double width = hi - lo;
  for (std::size_t i = 0; i < xs.size(); ++i) out[i] = lo + width * ((xs[i] - mn) / range);
  return out;
}

}  // namespace detail

/// Min-max map onto [-1, 1]. A constant series maps to all zeros.
inline SeriesWindow standardize(std::span<const double> series) {
  return detail::rescale(series, -1.0, 1.0, 0.0);
}

/// Min-max map onto [0, 1]. A constant series maps to all zeros.
inline SeriesWindow normalize_unit(std::span<const double> series) {
  return detail::rescale(series, 0.0, 1.0, 0.0);
}

/// Generator knobs. Everything here is recorded in dataset manifests.
struct EngineConfig {
  std::size_t k_min = 3;
  std::size_t k_max = 10;
  double max_noise_kernel_frac = 0.05;
  double trend_kernel_min_frac = 0.2;
  double trend_kernel_max_frac = 0.5;

  std::size_t trend_k_min = 1;
  std::size_t trend_k_max = 3;
  double trend_multiplier_max = 8.0;

  /// Number of sine slots reserved in the label matrix.
  std::size_t label_k_max = 10;

  bool operator==(const EngineConfig&) const = default;
};

inline constexpr std::size_t kEngineMaxSines = 32;

/// Throws ConfigError describing the first violated constraint.
inline void validate(const EngineConfig& c) {
  if (c.k_min < 1 || c.k_min > c.k_max) throw ConfigError("need 1 <= k_min <= k_max");
  if (c.k_max > kEngineMaxSines) throw ConfigError("k_max exceeds engine limit of 32");
  if (c.k_max > c.label_k_max) throw ConfigError("k_max exceeds the label schema's sine slots");
  if (!(c.max_noise_kernel_frac > 0.0 && c.max_noise_kernel_frac < 1.0))
    throw ConfigError("max_noise_kernel_frac must lie in (0, 1)");
  if (!(c.trend_kernel_min_frac > 0.0 && c.trend_kernel_min_frac <= c.trend_kernel_max_frac &&
        c.trend_kernel_max_frac <= 1.0))
    throw ConfigError("need 0 < trend_kernel_min_frac <= trend_kernel_max_frac <= 1");
  if (c.trend_kernel_min_frac <= c.max_noise_kernel_frac)
    throw ConfigError("trend kernels must be strictly larger than noise kernels");
  if (c.trend_k_min < 1 || c.trend_k_min > c.trend_k_max || c.trend_k_max > kEngineMaxSines)
    throw ConfigError("invalid trend sine count range");
  if (!(c.trend_multiplier_max > 1.0)) throw ConfigError("trend_multiplier_max must exceed 1");
}

inline void require_window(std::size_t n) {
  if (n < kMinWindowLen) throw InvalidWindow("window length " + std::to_string(n) + " is below 8");
}

}  // namespace synthts
