#pragma once

// Segment compression with verbatim keyframes, and reconstruction.
//
//   compress:    P = keyframes(x), (u, d) = refine_farey(r, N, |P|),
//                y = f_RP(x; u, d) per channel, store x[:, P] verbatim.
//   reconstruct: x~ = f_RP(y; d, u), fit to N samples, x~[:, P] <- verbatim.
//                Inconsistent metadata falls back to linear interpolation
//                through the stored keyframes.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "adacore/errors.hpp"
#include "adacore/rational.hpp"
#include "adacore/resampler.hpp"
#include "adacore/saliency.hpp"
#include "adacore/types.hpp"

namespace adacore {

inline constexpr std::uint32_t kDefaultMaxDenominator = 64;

struct CompressionResult {
  CompressedSegment compressed;
  double target_keep_ratio = 1.0;
  bool budget_overshoot = false;   // stored points exceed r*N at the smallest rate
  bool saliency_fallback = false;  // saliency failed; only endpoints protected

  double realized_keep_ratio() const {
    return static_cast<double>(compressed.low_rate_length + compressed.protected_indices.size()) /
           static_cast<double>(compressed.length);
  }
};

struct ReconstructionResult {
  Segment segment;
  bool used_fallback = false;
  std::string fallback_reason;
};

namespace codec {

/// Compress with an explicit protected set.
inline CompressionResult compress_with(const Segment& segment, const ProtectedSet& keyframes,
                                       double keep_ratio, std::uint32_t max_den) {
  if (!(keep_ratio > 0.0 && keep_ratio <= 1.0)) throw ParameterError("keep ratio must lie in (0, 1]");
  if (max_den < 1 || max_den > std::numeric_limits<std::uint16_t>::max()) {
    throw ParameterError("d_max must lie in [1, 65535]");
  }
  if (keyframes.segment_length() != segment.length()) {
    throw LengthError("protected set does not match segment length");
  }
  const std::size_t n = segment.length();
  const std::size_t c_count = segment.channels();
  if (n > std::numeric_limits<std::uint32_t>::max()) throw LengthError("segment too long");

  // r = 1 asks for no resampling at all.
  const RationalRate rate =
      keep_ratio == 1.0
          ? RationalRate{1, 1}
          : rational::refine_farey(keep_ratio, static_cast<std::uint32_t>(n),
                                   static_cast<std::uint32_t>(keyframes.size()), max_den);

  CompressionResult out;
  out.target_keep_ratio = keep_ratio;
  auto& cs = out.compressed;
  cs.length = n;
  cs.channels = c_count;
  cs.sample_rate = segment.sample_rate();
  cs.rate = rate;
  const auto plan = resample::make_plan(rate, n);
  cs.low_rate_length = plan.output_length;
  cs.low_rate.reserve(c_count * plan.output_length);
  for (std::size_t c = 0; c < c_count; ++c) {
    const auto y = resample::apply(plan, segment.channel(c));
    cs.low_rate.insert(cs.low_rate.end(), y.begin(), y.end());
  }
  cs.protected_indices.assign(keyframes.indices().begin(), keyframes.indices().end());
  cs.verbatim.reserve(keyframes.size() * c_count);
  for (const auto t : keyframes.indices()) {
    for (std::size_t c = 0; c < c_count; ++c) cs.verbatim.push_back(segment.at(c, t));
  }
  const auto kept = static_cast<double>(cs.low_rate_length + cs.protected_indices.size());
  out.budget_overshoot = kept > keep_ratio * static_cast<double>(n) && rate == RationalRate{1, max_den};
  return out;
}

/// Keyframes from the saliency pass, then compress. A saliency failure
/// (band above Nyquist, segment too short to filter) protects the endpoints
/// only and is flagged.
inline CompressionResult compress(const Segment& segment, double keep_ratio,
                                  const SaliencyConfig& config,
                                  std::uint32_t max_den = kDefaultMaxDenominator) {
  bool fallback = false;
  ProtectedSet keyframes = ProtectedSet::endpoints_only(segment.length());
  try {
    keyframes = saliency::analyze(segment, config).protected_set;
  } catch (const ParameterError&) {
    fallback = true;
  } catch (const LengthError&) {
    fallback = true;
  }
  auto out = compress_with(segment, keyframes, keep_ratio, max_den);
  out.saliency_fallback = fallback;
  return out;
}

/// Samples at each edge affected by the compress/reconstruct kernels; the
/// fidelity interior excludes them.
inline std::size_t edge_margin(RationalRate rate) {
  if (!rate.valid()) return 0;
  const std::uint64_t span = 2 * resample::kTapsPerBranch * rate.den;
  return static_cast<std::size_t>((span + rate.num - 1) / rate.num);
}

/// Piecewise-linear per-channel interpolation through known samples.
/// `indices` must be strictly increasing, start at 0 and end at N - 1;
/// `values` is |indices| x C, index-major.
inline Segment fallback_interpolate(std::span<const std::uint32_t> indices,
                                    std::span<const float> values, std::size_t length,
                                    std::size_t channels, float sample_rate) {
  if (indices.size() < 2) throw LengthError("interpolation needs at least two known samples");
  if (values.size() != indices.size() * channels) throw LengthError("value count mismatch");
  if (indices.front() != 0 || indices.back() != length - 1) {
    throw ParameterError("known samples must include both endpoints");
  }
  for (std::size_t i = 1; i < indices.size(); ++i) {
    if (indices[i] <= indices[i - 1]) throw ParameterError("known indices must be strictly increasing");
  }
  std::vector<float> data(channels * length);
  for (std::size_t c = 0; c < channels; ++c) {
    float* row = data.data() + c * length;
    for (std::size_t j = 0; j + 1 < indices.size(); ++j) {
      const std::size_t a = indices[j], b = indices[j + 1];
      const float va = values[j * channels + c], vb = values[(j + 1) * channels + c];
      row[a] = va;
      const double span = static_cast<double>(b - a);
      for (std::size_t t = a + 1; t < b; ++t) {
        const double w = static_cast<double>(t - a) / span;
        row[t] = static_cast<float>((1.0 - w) * va + w * vb);
      }
      row[b] = vb;
    }
  }
  return Segment(channels, length, sample_rate, std::move(data));
}

/// Empty string when the container can take the regular path.
inline std::string inconsistency(const CompressedSegment& cs) {
  if (cs.length < 2) return "segment length below 2";
  if (cs.channels < 1) return "no channels";
  if (!(cs.sample_rate > 0.0f) || !std::isfinite(cs.sample_rate)) return "invalid sample rate";
  if (!cs.rate.valid()) return "invalid rate";
  if (cs.low_rate_length != resampled_length(cs.length, cs.rate)) return "low-rate length mismatch";
  if (cs.low_rate.size() != cs.low_rate_length * cs.channels) return "low-rate data size mismatch";
  if (cs.verbatim.size() != cs.protected_indices.size() * cs.channels) return "verbatim size mismatch";
  const auto& p = cs.protected_indices;
  if (p.size() < 2 || p.front() != 0 || p.back() != cs.length - 1) return "endpoints not protected";
  for (std::size_t i = 1; i < p.size(); ++i) {
    if (p[i] <= p[i - 1]) return "protected indices not strictly increasing";
  }
  auto finite = [](float v) { return std::isfinite(v); };
  if (!std::all_of(cs.low_rate.begin(), cs.low_rate.end(), finite)) return "non-finite low-rate sample";
  if (!std::all_of(cs.verbatim.begin(), cs.verbatim.end(), finite)) return "non-finite verbatim sample";
  return {};
}

namespace detail {

// Interpolation from whatever keyframes are usable: in range, finite, first
// occurrence wins. Missing endpoints hold the nearest known value; with no
// usable keyframe at all the output is zero.
inline Segment salvage(const CompressedSegment& cs) {
  const std::size_t n = std::max<std::size_t>(cs.length, 2);
  const std::size_t c_count = std::max<std::size_t>(cs.channels, 1);
  const float fs = (cs.sample_rate > 0.0f && std::isfinite(cs.sample_rate)) ? cs.sample_rate : 1.0f;
  const bool shaped = cs.channels >= 1 && cs.length >= 2 &&
                      cs.verbatim.size() == cs.protected_indices.size() * cs.channels;

  std::vector<std::pair<std::uint32_t, std::vector<float>>> known;
  if (shaped) {
    for (std::size_t i = 0; i < cs.protected_indices.size(); ++i) {
      const auto t = cs.protected_indices[i];
      if (t >= n) continue;
      std::vector<float> v(cs.verbatim.begin() + static_cast<std::ptrdiff_t>(i * c_count),
                           cs.verbatim.begin() + static_cast<std::ptrdiff_t>((i + 1) * c_count));
      if (!std::all_of(v.begin(), v.end(), [](float x) { return std::isfinite(x); })) continue;
      known.emplace_back(t, std::move(v));
    }
  }
  std::stable_sort(known.begin(), known.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  known.erase(std::unique(known.begin(), known.end(),
                          [](const auto& a, const auto& b) { return a.first == b.first; }),
              known.end());
  if (known.empty()) return Segment::zeros(c_count, n, fs);
  if (known.front().first != 0) known.insert(known.begin(), {0u, known.front().second});
  if (known.back().first != n - 1) {
    known.emplace_back(static_cast<std::uint32_t>(n - 1), known.back().second);
  }
  std::vector<std::uint32_t> idx;
  std::vector<float> vals;
  for (const auto& [t, v] : known) {
    idx.push_back(t);
    vals.insert(vals.end(), v.begin(), v.end());
  }
  return fallback_interpolate(idx, vals, n, c_count, fs);
}

}  // namespace detail

/// Never throws on a decoded container: inconsistent metadata takes the
/// interpolation path and is reported.
inline ReconstructionResult reconstruct(const CompressedSegment& cs) {
  if (auto why = inconsistency(cs); !why.empty()) {
    return {detail::salvage(cs), true, why};
  }
  const std::size_t n = cs.length;
  const auto plan = resample::make_plan(cs.rate.swapped(), cs.low_rate_length);
  std::vector<float> data;
  data.reserve(cs.channels * n);
  for (std::size_t c = 0; c < cs.channels; ++c) {
    auto dense = resample::apply(plan, cs.low_rate_channel(c));
    if (dense.size() >= n) {
      dense.resize(n);
    } else {
      dense.resize(n, dense.empty() ? 0.0f : dense.back());
    }
    data.insert(data.end(), dense.begin(), dense.end());
  }
  for (std::size_t i = 0; i < cs.protected_indices.size(); ++i) {
    const auto t = cs.protected_indices[i];
    for (std::size_t c = 0; c < cs.channels; ++c) data[c * n + t] = cs.verbatim[i * cs.channels + c];
  }
  return {Segment(cs.channels, n, cs.sample_rate, std::move(data)), false, {}};
}

}  // namespace codec
}  // namespace adacore
