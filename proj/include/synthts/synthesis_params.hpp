#pragma once

#include <cstddef>
#include <cstdint>

#include "synthts/core_types.hpp"
#include "synthts/noise.hpp"
#include "synthts/rhythm.hpp"
#include "synthts/trend.hpp"

namespace synthts {

/// Complete generative record of one synthetic window. Together with the engine
/// version it determines the sample exactly.
struct SynthesisParams {
  RhythmParams rhythm;
  NoiseSpec noise;
  TrendSpec trend;
  MixRatios ratios;
  std::size_t window_len = 0;
  std::uint64_t seed = 0;
  std::uint64_t sample_key = 0;

  bool operator==(const SynthesisParams&) const = default;
};

}  // namespace synthts
