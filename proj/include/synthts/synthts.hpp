#pragma once

// Umbrella header.

#include "synthts/binary_format.hpp"
#include "synthts/core_types.hpp"
#include "synthts/dataset.hpp"
#include "synthts/errors.hpp"
#include "synthts/ingest.hpp"
#include "synthts/labels.hpp"
#include "synthts/metrics.hpp"
#include "synthts/mixer.hpp"
#include "synthts/noise.hpp"
#include "synthts/random.hpp"
#include "synthts/rhythm.hpp"
#include "synthts/stream.hpp"
#include "synthts/synthesis_params.hpp"
#include "synthts/trend.hpp"
