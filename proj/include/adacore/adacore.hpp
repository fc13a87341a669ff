#pragma once

#include "adacore/codec.hpp"
#include "adacore/container.hpp"
#include "adacore/dsp.hpp"
#include "adacore/errors.hpp"
#include "adacore/metrics.hpp"
#include "adacore/presets.hpp"
#include "adacore/rational.hpp"
#include "adacore/replay_buffer.hpp"
#include "adacore/resampler.hpp"
#include "adacore/saliency.hpp"
#include "adacore/synthetic.hpp"
#include "adacore/types.hpp"
