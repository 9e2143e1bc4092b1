#pragma once

/**
 * @file noise.hpp
 * @brief Noise specification sampling and the noise rendering pipeline.
 *
 * The roster holds 15 distributions in 5 categories (three each). A rendered
 * noise window goes through:
 *   1. N i.i.d. draws from the distribution with randomized parameters,
 *      winsorized at the 0.1% / 99.9% batch quantiles;
 *   2. min-max normalization to [0, 1];
 *   3. optional reflection y <- 1 - y;
 *   4. boxcar smoothing with edge replication;
 *   5. min-max re-normalization to [0, 1].
 *
 * The roster order, category grouping and parameter priors form a versioned
 * contract (kNoiseRosterVersion): label channels index into this table.
 */

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include "synthts/core_types.hpp"
#include "synthts/random.hpp"

namespace synthts {

inline constexpr int kNoiseRosterVersion = 1;

enum class NoiseCategory : std::uint8_t {
  CommonContinuous = 0,   // CCD
  CommonDiscrete = 1,     // CDD
  HeavyTailed = 2,        // HTD
  NormalRelated = 3,      // DRND
  ShapeParameter = 4,     // SPD
};

inline constexpr std::size_t kNoiseCategoryCount = 5;

enum class NoiseDistribution : std::uint8_t {
  Uniform = 0,
  Normal,
  Exponential,
  Bernoulli,
  Geometric,
  Poisson,
  Laplace,
  Cauchy,
  Pareto,
  StudentT,
  ChiSquared,
  LogNormal,
  Beta,
  Gamma,
  Weibull,
};

inline constexpr std::size_t kNoiseDistributionCount = 15;
inline constexpr std::size_t kMaxNoiseParams = 3;

struct ParamPrior {
  std::string_view name;
  double lo;
  double hi;
};

struct DistributionInfo {
  std::string_view name;
  NoiseCategory category;
  std::size_t param_count;
  std::array<ParamPrior, kMaxNoiseParams> priors;
};

inline constexpr std::array<DistributionInfo, kNoiseDistributionCount> kNoiseRoster{{
    {"uniform", NoiseCategory::CommonContinuous, 1, {{{"width", 0.5, 2.0}}}},
    {"normal", NoiseCategory::CommonContinuous, 1, {{{"sigma", 0.5, 2.0}}}},
    {"exponential", NoiseCategory::CommonContinuous, 1, {{{"rate", 0.5, 20.0}}}},
    {"bernoulli", NoiseCategory::CommonDiscrete, 1, {{{"p", 0.05, 0.95}}}},
    {"geometric", NoiseCategory::CommonDiscrete, 1, {{{"p", 0.05, 0.95}}}},
    {"poisson", NoiseCategory::CommonDiscrete, 1, {{{"lambda", 0.5, 20.0}}}},
    {"laplace", NoiseCategory::HeavyTailed, 1, {{{"scale", 0.5, 2.0}}}},
    {"cauchy", NoiseCategory::HeavyTailed, 1, {{{"scale", 0.5, 2.0}}}},
    {"pareto", NoiseCategory::HeavyTailed, 2, {{{"shape", 0.5, 5.0}, {"scale", 0.5, 2.0}}}},
    {"student_t", NoiseCategory::NormalRelated, 1, {{{"dof", 2.5, 30.0}}}},
    {"chi_squared", NoiseCategory::NormalRelated, 1, {{{"dof", 1.0, 10.0}}}},
    {"log_normal", NoiseCategory::NormalRelated, 1, {{{"sigma", 0.5, 2.0}}}},
    {"beta", NoiseCategory::ShapeParameter, 2, {{{"alpha", 0.5, 5.0}, {"beta", 0.5, 5.0}}}},
    {"gamma", NoiseCategory::ShapeParameter, 2, {{{"shape", 0.5, 5.0}, {"scale", 0.5, 2.0}}}},
    {"weibull", NoiseCategory::ShapeParameter, 2, {{{"shape", 0.5, 5.0}, {"scale", 0.5, 2.0}}}},
}};

inline constexpr std::array<std::string_view, kNoiseCategoryCount> kNoiseCategoryNames{
    "CCD", "CDD", "HTD", "DRND", "SPD"};

constexpr const DistributionInfo& info(NoiseDistribution d) {
  return kNoiseRoster[static_cast<std::size_t>(d)];
}

constexpr NoiseCategory category_of(NoiseDistribution d) { return info(d).category; }

struct NoiseSpec {
  NoiseDistribution distribution = NoiseDistribution::Normal;
  std::array<double, kMaxNoiseParams> params{};  // first param_count entries used
  bool invert = false;
  std::size_t smooth_kernel = 1;

  NoiseCategory category() const { return category_of(distribution); }
  std::size_t param_count() const { return info(distribution).param_count; }
  bool operator==(const NoiseSpec&) const = default;
};

/// Largest smoothing kernel allowed for noise: floor(frac * N), at least 1.
inline std::size_t max_noise_kernel(std::size_t window_len, double frac = 0.05) {
  const auto cap = static_cast<std::size_t>(std::floor(frac * static_cast<double>(window_len) + 1e-9));
  return std::max<std::size_t>(cap, 1);
}

inline bool params_in_domain(const NoiseSpec& spec) {
  const auto& d = info(spec.distribution);
  for (std::size_t i = 0; i < d.param_count; ++i) {
    const double v = spec.params[i];
    if (!(v >= d.priors[i].lo && v <= d.priors[i].hi)) return false;
  }
  return true;
}

/// Distribution, parameters and invert flag only; the caller picks the kernel range.
inline NoiseSpec sample_noise_shape(RandomStream& rng) {
  NoiseSpec spec;
  spec.distribution = static_cast<NoiseDistribution>(rng.uniform_int(0, kNoiseDistributionCount - 1));
  const auto& d = info(spec.distribution);
  for (std::size_t i = 0; i < d.param_count; ++i) spec.params[i] = rng.uniform(d.priors[i].lo, d.priors[i].hi);
  spec.invert = rng.bernoulli(0.5);
  return spec;
}

inline NoiseSpec sample_noise_spec(std::size_t window_len, RandomStream& rng, double max_kernel_frac = 0.05) {
  require_window(window_len);
  NoiseSpec spec = sample_noise_shape(rng);
  spec.smooth_kernel = static_cast<std::size_t>(rng.uniform_int(1, max_noise_kernel(window_len, max_kernel_frac)));
  return spec;
}

/// Step 1 without winsorization: N raw i.i.d. draws.
inline SeriesWindow draw_noise(const NoiseSpec& spec, std::size_t n, RandomStream& rng) {
  SeriesWindow out(n);
  const auto& p = spec.params;
  auto fill = [&](auto&& dist) {
    for (auto& v : out) v = static_cast<double>(dist(rng));
  };
  switch (spec.distribution) {
    case NoiseDistribution::Uniform:
      for (auto& v : out) v = p[0] * rng.uniform01();
      break;
    case NoiseDistribution::Normal:
      fill(std::normal_distribution<double>(0.0, p[0]));
      break;
    case NoiseDistribution::Exponential:
      fill(std::exponential_distribution<double>(p[0]));
      break;
    case NoiseDistribution::Bernoulli:
      for (auto& v : out) v = rng.bernoulli(p[0]) ? 1.0 : 0.0;
      break;
    case NoiseDistribution::Geometric:
      fill(std::geometric_distribution<long>(p[0]));
      break;
    case NoiseDistribution::Poisson:
      fill(std::poisson_distribution<long>(p[0]));
      break;
    case NoiseDistribution::Laplace:
      // Inverse CDF on u in (-1/2, 1/2).
      for (auto& v : out) {
        double u = rng.uniform01() - 0.5;
        while (u == -0.5) u = rng.uniform01() - 0.5;
        v = (u < 0.0 ? p[0] : -p[0]) * std::log1p(-2.0 * std::abs(u));
      }
      break;
    case NoiseDistribution::Cauchy:
      fill(std::cauchy_distribution<double>(0.0, p[0]));
      break;
    case NoiseDistribution::Pareto:
      // x_m * U^(-1/alpha), U in (0, 1].
      for (auto& v : out) v = p[1] * std::pow(1.0 - rng.uniform01(), -1.0 / p[0]);
      break;
    case NoiseDistribution::StudentT:
      fill(std::student_t_distribution<double>(p[0]));
      break;
    case NoiseDistribution::ChiSquared:
      fill(std::chi_squared_distribution<double>(p[0]));
      break;
    case NoiseDistribution::LogNormal:
      fill(std::lognormal_distribution<double>(0.0, p[0]));
      break;
    case NoiseDistribution::Beta: {
      std::gamma_distribution<double> ga(p[0], 1.0), gb(p[1], 1.0);
      for (auto& v : out) {
        const double x = ga(rng);
        const double y = gb(rng);
        v = (x + y) > 0.0 ? x / (x + y) : 0.5;
      }
      break;
    }
    case NoiseDistribution::Gamma:
      fill(std::gamma_distribution<double>(p[0], p[1]));
      break;
    case NoiseDistribution::Weibull:
      fill(std::weibull_distribution<double>(p[0], p[1]));
      break;
  }
  return out;
}

/// Linear-interpolation quantile of an unsorted sample (q in [0, 1]).
inline double quantile(std::span<const double> xs, double q) {
  if (xs.empty()) throw InvalidSeries("quantile of empty series");
  std::vector<double> tmp(xs.begin(), xs.end());
  const double pos = q * static_cast<double>(tmp.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  std::nth_element(tmp.begin(), tmp.begin() + static_cast<std::ptrdiff_t>(lo), tmp.end());
  const double a = tmp[lo];
  if (lo + 1 >= tmp.size()) return a;
  const double b = *std::min_element(tmp.begin() + static_cast<std::ptrdiff_t>(lo) + 1, tmp.end());
  return a + (pos - static_cast<double>(lo)) * (b - a);
}

inline constexpr double kWinsorQuantile = 0.001;

/// Clamp to the [q, 1-q] batch quantiles. Non-finite draws (overflowed heavy
/// tails) are replaced by the nearest finite extreme first.
inline void winsorize(SeriesWindow& xs, double q = kWinsorQuantile) {
  if (xs.empty()) return;
  double lo_f = std::numeric_limits<double>::max(), hi_f = std::numeric_limits<double>::lowest();
  for (double v : xs)
    if (std::isfinite(v)) lo_f = std::min(lo_f, v), hi_f = std::max(hi_f, v);
  if (lo_f > hi_f) lo_f = hi_f = 0.0;
  for (double& v : xs)
    if (!std::isfinite(v)) v = (v > 0.0) ? hi_f : lo_f;  // NaN falls to lo
  const double lo = quantile(xs, q);
  const double hi = quantile(xs, 1.0 - q);
  for (double& v : xs) v = std::clamp(v, lo, hi);
}

inline void reflect_unit(SeriesWindow& xs) {
  for (double& v : xs) v = 1.0 - v;
}

/// Centered moving average of width w with edge-replication padding. w = 1 is
/// the identity.
inline SeriesWindow box_smooth(std::span<const double> xs, std::size_t w) {
  if (w == 0) throw ConfigError("smoothing kernel must be at least 1");
  if (w == 1 || xs.empty()) return SeriesWindow(xs.begin(), xs.end());
  const std::size_t n = xs.size();
  const std::ptrdiff_t left = static_cast<std::ptrdiff_t>((w - 1) / 2);
  const std::size_t padded = n + w - 1;
  std::vector<long double> prefix(padded + 1, 0.0L);
  for (std::size_t i = 0; i < padded; ++i) {
    const auto src = std::clamp<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(i) - left, 0,
                                                static_cast<std::ptrdiff_t>(n) - 1);
    prefix[i + 1] = prefix[i] + xs[static_cast<std::size_t>(src)];
  }
  SeriesWindow out(n);
  const auto wl = static_cast<long double>(w);
  for (std::size_t i = 0; i < n; ++i) out[i] = static_cast<double>((prefix[i + w] - prefix[i]) / wl);
  return out;
}

inline double total_variation(std::span<const double> xs) {
  double tv = 0.0;
  for (std::size_t i = 1; i < xs.size(); ++i) tv += std::abs(xs[i] - xs[i - 1]);
  return tv;
}

/// Steps 1-3: winsorized draws, normalized to [0, 1], optionally reflected.
inline SeriesWindow prepare_noise(const NoiseSpec& spec, std::size_t n, RandomStream& rng) {
  SeriesWindow raw = draw_noise(spec, n, rng);
  winsorize(raw);
  SeriesWindow y = normalize_unit(raw);
  if (spec.invert) reflect_unit(y);
  return y;
}

/// Full five-step pipeline. Output lies in [0, 1]; both ends are attained
/// unless the draws were constant, in which case it is all zeros.
inline SeriesWindow render_noise(const NoiseSpec& spec, std::size_t n, RandomStream& rng) {
  const SeriesWindow y = prepare_noise(spec, n, rng);
  return normalize_unit(box_smooth(y, std::min(spec.smooth_kernel, std::max<std::size_t>(n, 1))));
}

}  // namespace synthts
