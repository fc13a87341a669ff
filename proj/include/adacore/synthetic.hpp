#pragma once

// Synthetic EEG-like fixtures: pink-plus-white background with Hann-windowed
// sinusoidal bursts (spindle-like events) at known positions.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "adacore/errors.hpp"
#include "adacore/types.hpp"

namespace adacore::synthetic {

struct Event {
  double center_seconds = 0.0;
  double duration_seconds = 1.0;
  double frequency_hz = 13.0;
  double amplitude = 1.0;
};

struct FixtureSpec {
  double sample_rate = 100.0;
  std::size_t length = 3000;
  std::size_t channels = 1;
  double noise_level = 0.0;  // background standard deviation
  std::vector<Event> events;
  std::uint64_t seed = 0;
};

struct Interval {
  std::size_t begin = 0;  // inclusive
  std::size_t end = 0;    // exclusive
};

struct Fixture {
  Segment segment;
  std::vector<Interval> events;
};

/// Sample interval of an event; throws ParameterError if it leaves [0, N).
inline Interval event_interval(const Event& e, double sample_rate, std::size_t length) {
  const double begin = std::round((e.center_seconds - e.duration_seconds / 2.0) * sample_rate);
  const double end = std::round((e.center_seconds + e.duration_seconds / 2.0) * sample_rate);
  if (!(e.duration_seconds > 0.0) || begin < 0.0 || end > static_cast<double>(length) || end <= begin) {
    throw ParameterError("event at " + std::to_string(e.center_seconds) + " s lies outside the segment");
  }
  return {static_cast<std::size_t>(begin), static_cast<std::size_t>(end)};
}

namespace detail {

// Paul Kellet's pink filter, normalized to zero mean and unit deviation.
inline std::vector<double> pink_noise(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> white(0.0, 1.0);
  double b0 = 0, b1 = 0, b2 = 0, b3 = 0, b4 = 0, b5 = 0, b6 = 0;
  std::vector<double> out(n);
  for (auto& v : out) {
    const double w = white(rng);
    b0 = 0.99886 * b0 + w * 0.0555179;
    b1 = 0.99332 * b1 + w * 0.0750759;
    b2 = 0.96900 * b2 + w * 0.1538520;
    b3 = 0.86650 * b3 + w * 0.3104856;
    b4 = 0.55000 * b4 + w * 0.5329522;
    b5 = -0.7616 * b5 - w * 0.0168980;
    v = b0 + b1 + b2 + b3 + b4 + b5 + b6 + w * 0.5362;
    b6 = w * 0.115926;
  }
  double mean = 0.0;
  for (double v : out) mean += v;
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (double v : out) var += (v - mean) * (v - mean);
  const double sd = std::sqrt(var / static_cast<double>(n));
  for (auto& v : out) v = sd > 0.0 ? (v - mean) / sd : 0.0;
  return out;
}

}  // namespace detail

inline Fixture generate(const FixtureSpec& spec) {
  if (!(spec.sample_rate > 0.0)) throw ParameterError("sample rate must be positive");
  if (spec.length < 2 || spec.channels < 1) throw ParameterError("fixture needs N >= 2 and C >= 1");
  if (!(spec.noise_level >= 0.0)) throw ParameterError("noise level must be non-negative");

  std::vector<Interval> intervals;
  for (const auto& e : spec.events) intervals.push_back(event_interval(e, spec.sample_rate, spec.length));

  std::mt19937_64 rng(spec.seed);
  const std::size_t n = spec.length;
  std::vector<double> data(spec.channels * n, 0.0);
  if (spec.noise_level > 0.0) {
    std::normal_distribution<double> white(0.0, 1.0);
    for (std::size_t c = 0; c < spec.channels; ++c) {
      const auto pink = detail::pink_noise(n, rng);
      for (std::size_t i = 0; i < n; ++i) {
        data[c * n + i] = spec.noise_level * (pink[i] + white(rng)) / std::numbers::sqrt2;
      }
    }
  }

  std::uniform_real_distribution<double> phase_dist(0.0, 2.0 * std::numbers::pi);
  for (std::size_t k = 0; k < spec.events.size(); ++k) {
    const auto& e = spec.events[k];
    const auto [begin, end] = intervals[k];
    const double phase = phase_dist(rng);
    const double span = static_cast<double>(end - begin);
    for (std::size_t i = begin; i < end; ++i) {
      const double pos = (static_cast<double>(i - begin) + 0.5) / span;
      const double taper = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * pos);
      const double v = e.amplitude * taper *
                       std::sin(2.0 * std::numbers::pi * e.frequency_hz * static_cast<double>(i) / spec.sample_rate + phase);
      for (std::size_t c = 0; c < spec.channels; ++c) data[c * n + i] += v;
    }
  }

  std::vector<float> samples(data.begin(), data.end());
  return {Segment(spec.channels, n, static_cast<float>(spec.sample_rate), std::move(samples)),
          std::move(intervals)};
}

}  // namespace adacore::synthetic
