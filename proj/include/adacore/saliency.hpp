#pragma once

// Saliency trace, robust peak threshold and coverage-capped keyframe
// selection.
//
//   S[n] = sum_b w_b * Pow_b[n] + gamma * TK[n]
//
// Pow_b is the zero-phase band-pass envelope, smoothed and averaged over
// channels. TK is the rectified Teager-Kaiser energy per channel, smoothed
// and then averaged over channels. w_b are robust band statistics
// normalized over the top-K bands.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "adacore/dsp.hpp"
#include "adacore/errors.hpp"
#include "adacore/types.hpp"

namespace adacore {

enum class WeightStatistic { median, trimmed_mean };

struct Band {
  double low_hz = 0.0;
  double high_hz = 0.0;
};

struct SaliencyConfig {
  std::vector<Band> bands;
  WeightStatistic weight_stat = WeightStatistic::median;
  double trim_fraction = 0.1;   // per tail, for trimmed_mean
  std::size_t top_k = 1;
  double gamma = 0.0;           // TK weight
  double kappa = 2.5;           // threshold multiplier
  double rho_seconds = 0.5;     // protection radius
  double phi = 0.05;            // coverage cap fraction
  double smooth_seconds = 0.5;  // W
  std::size_t stride = 5;       // peak candidate grid, samples
  double kaiser_beta = 8.6;

  /// Throws ParameterError if the configuration is unusable at `sample_rate`.
  void validate(double sample_rate) const {
    if (!(sample_rate > 0.0)) throw ParameterError("sample rate must be positive");
    if (bands.empty()) throw ParameterError("saliency needs at least one band");
    for (const auto& b : bands) {
      if (!(b.low_hz > 0.0 && b.low_hz < b.high_hz && b.high_hz < sample_rate / 2.0)) {
        throw ParameterError("band [" + std::to_string(b.low_hz) + ", " +
                             std::to_string(b.high_hz) + "] Hz outside (0, Fs/2)");
      }
    }
    if (top_k < 1 || top_k > bands.size()) throw ParameterError("top_k must lie in [1, |bands|]");
    if (!(gamma >= 0.0)) throw ParameterError("gamma must be non-negative");
    if (!std::isfinite(kappa)) throw ParameterError("kappa must be finite");
    if (!(rho_seconds >= 0.0)) throw ParameterError("rho must be non-negative");
    if (!(phi > 0.0 && phi < 1.0)) throw ParameterError("phi must lie in (0, 1)");
    if (!(smooth_seconds > 0.0)) throw ParameterError("smoothing window must be positive");
    if (stride < 1) throw ParameterError("stride must be >= 1");
    if (weight_stat == WeightStatistic::trimmed_mean && !(trim_fraction >= 0.0 && trim_fraction < 0.5)) {
      throw ParameterError("trim fraction must lie in [0, 0.5)");
    }
  }

  /// W = floor(smooth_seconds * Fs), at least one sample.
  std::size_t smooth_samples(double sample_rate) const {
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(smooth_seconds * sample_rate + 1e-9)));
  }
  std::size_t rho_samples(double sample_rate) const {
    return static_cast<std::size_t>(std::lround(rho_seconds * sample_rate));
  }
};

struct SaliencyTrace {
  std::vector<double> values;        // S[n] >= 0
  std::vector<double> band_weights;  // w_b in configured band order
  double threshold = 0.0;            // tau
  std::vector<std::uint32_t> peaks;  // every peak p has S[p] > tau
};

struct SaliencyResult {
  SaliencyTrace trace;
  ProtectedSet protected_set;
};

namespace saliency {

inline double median(std::vector<double> v) {
  if (v.empty()) throw LengthError("median of empty sequence");
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  const double upper = v[mid];
  if (v.size() % 2 == 1) return upper;
  const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

/// Mean after dropping floor(trim * n) samples from each tail.
inline double trimmed_mean(std::vector<double> v, double trim) {
  if (v.empty()) throw LengthError("trimmed mean of empty sequence");
  std::sort(v.begin(), v.end());
  const auto cut = static_cast<std::size_t>(std::floor(trim * static_cast<double>(v.size())));
  const auto first = v.begin() + static_cast<std::ptrdiff_t>(cut);
  const auto last = v.end() - static_cast<std::ptrdiff_t>(cut);
  return std::accumulate(first, last, 0.0) / static_cast<double>(last - first);
}

/// Largest odd tap count T with 3T < n (the filtfilt precondition).
inline std::size_t max_filtfilt_taps(std::size_t n) {
  std::size_t t = n == 0 ? 0 : (n - 1) / 3;
  if (t % 2 == 0 && t > 0) --t;
  return t;
}

/// Smoothed, channel-averaged envelope of one frequency band. The band-pass
/// length follows the Kaiser estimate for `beta`, shortened when the segment
/// is too short for it.
inline std::vector<double> band_power(const Segment& segment, Band band,
                                      std::size_t smooth_window, double beta = 8.6) {
  const double fs = segment.sample_rate();
  if (!(band.low_hz > 0.0 && band.low_hz < band.high_hz && band.high_hz < fs / 2.0)) {
    throw ParameterError("band outside (0, Fs/2)");
  }
  const double low = band.low_hz / fs;
  const double high = band.high_hz / fs;
  const std::size_t n = segment.length();
  const std::size_t limit = max_filtfilt_taps(n);
  if (limit < 3) throw LengthError("segment too short for band-pass filtering");
  const std::size_t taps = std::min(dsp::bandpass_num_taps(low, high, beta), limit);
  const auto kernel = dsp::design_bandpass(low, high, beta, taps);

  std::vector<double> mean(n, 0.0);
  for (std::size_t c = 0; c < segment.channels(); ++c) {
    const auto filtered = dsp::filtfilt(segment.channel(c), kernel);
    const auto env = dsp::hilbert_envelope(std::span<const double>(filtered));
    for (std::size_t i = 0; i < n; ++i) mean[i] += env[i];
  }
  for (auto& v : mean) v /= static_cast<double>(segment.channels());
  return dsp::moving_average(std::span<const double>(mean), std::min(smooth_window, n));
}

/// Per-channel rectified TK energy, smoothed, then averaged over channels.
inline std::vector<double> transient_energy(const Segment& segment, std::size_t smooth_window) {
  const std::size_t n = segment.length();
  if (n < 3) throw LengthError("segment too short for teager-kaiser");
  std::vector<double> agg(n, 0.0);
  for (std::size_t c = 0; c < segment.channels(); ++c) {
    const auto psi = dsp::teager_kaiser(segment.channel(c));
    const auto smooth = dsp::moving_average(std::span<const double>(psi), std::min(smooth_window, n));
    for (std::size_t i = 0; i < n; ++i) agg[i] += smooth[i];
  }
  for (auto& v : agg) v /= static_cast<double>(segment.channels());
  return agg;
}

/// Computes S[n] and the band weights; threshold and peaks are left empty.
inline SaliencyTrace saliency_trace(const Segment& segment, const SaliencyConfig& config) {
  const double fs = segment.sample_rate();
  config.validate(fs);
  const std::size_t n = segment.length();
  const std::size_t window = std::min(config.smooth_samples(fs), n);

  std::vector<std::vector<double>> powers;
  std::vector<double> stats;
  for (const auto& band : config.bands) {
    powers.push_back(band_power(segment, band, window, config.kaiser_beta));
    stats.push_back(config.weight_stat == WeightStatistic::median
                        ? median(powers.back())
                        : trimmed_mean(powers.back(), config.trim_fraction));
  }

  // Keep the top_k bands by statistic (ties: configured order).
  std::vector<std::size_t> order(stats.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return stats[a] > stats[b]; });
  SaliencyTrace trace;
  trace.band_weights.assign(stats.size(), 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < config.top_k; ++i) total += stats[order[i]];
  if (total > 0.0) {
    for (std::size_t i = 0; i < config.top_k; ++i) trace.band_weights[order[i]] = stats[order[i]] / total;
  }

  trace.values.assign(n, 0.0);
  for (std::size_t b = 0; b < powers.size(); ++b) {
    const double w = trace.band_weights[b];
    if (w == 0.0) continue;
    for (std::size_t i = 0; i < n; ++i) trace.values[i] += w * powers[b][i];
  }
  if (config.gamma > 0.0) {
    const auto tk = transient_energy(segment, window);
    for (std::size_t i = 0; i < n; ++i) trace.values[i] += config.gamma * tk[i];
  }
  return trace;
}

/// tau = Med(S) + kappa * 1.4826 * MAD(S). Zero MAD falls back to the sample
/// standard deviation; a constant trace yields tau = Med(S).
inline double robust_threshold(std::span<const double> s, double kappa) {
  if (s.empty()) throw LengthError("threshold of empty trace");
  std::vector<double> v(s.begin(), s.end());
  const double med = median(v);
  for (auto& x : v) x = std::abs(x - med);
  double scale = 1.4826 * median(v);
  if (scale == 0.0 && s.size() > 1) {
    const double mean = std::accumulate(s.begin(), s.end(), 0.0) / static_cast<double>(s.size());
    double ss = 0.0;
    for (double x : s) ss += (x - mean) * (x - mean);
    scale = std::sqrt(ss / static_cast<double>(s.size() - 1));
  }
  return scale == 0.0 ? med : med + kappa * scale;
}

/// Local maxima on the grid {0, s, 2s, ...} that strictly exceed tau. Ties
/// with a grid neighbour count as maxima.
inline std::vector<std::uint32_t> detect_peaks(std::span<const double> s, double tau,
                                               std::size_t stride) {
  if (stride < 1) throw ParameterError("stride must be >= 1");
  std::vector<std::uint32_t> peaks;
  for (std::size_t p = 0; p < s.size(); p += stride) {
    if (!(s[p] > tau)) continue;
    if (p >= stride && s[p] < s[p - stride]) continue;
    if (p + stride < s.size() && s[p] < s[p + stride]) continue;
    peaks.push_back(static_cast<std::uint32_t>(p));
  }
  return peaks;
}

/// Greedy keyframe selection: strongest peaks first (ties: lower index), each
/// contributing [p - rho, p + rho]. A peak whose marginal coverage would push
/// the peak-derived total past ceil(phi * N) is skipped and the scan goes on.
/// Both endpoints are added afterwards, outside the cap.
inline ProtectedSet build_protected_set(std::span<const std::uint32_t> peaks,
                                        std::span<const double> s, std::size_t rho,
                                        double phi, std::size_t length) {
  if (length < 2) throw LengthError("segment length must be >= 2");
  if (!(phi > 0.0 && phi < 1.0)) throw ParameterError("phi must lie in (0, 1)");
  const auto cap = static_cast<std::size_t>(std::ceil(phi * static_cast<double>(length) - 1e-9));

  std::vector<std::uint32_t> order(peaks.begin(), peaks.end());
  std::stable_sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    return s[a] != s[b] ? s[a] > s[b] : a < b;
  });

  std::vector<bool> mask(length, false);
  std::size_t covered = 0;
  for (const auto p : order) {
    if (p >= length) continue;
    const std::size_t lo = p >= rho ? p - rho : 0;
    const std::size_t hi = std::min(length - 1, static_cast<std::size_t>(p) + rho);
    std::size_t fresh = 0;
    for (std::size_t i = lo; i <= hi; ++i) fresh += mask[i] ? 0 : 1;
    if (covered + fresh > cap) continue;
    for (std::size_t i = lo; i <= hi; ++i) mask[i] = true;
    covered += fresh;
  }
  mask.front() = true;
  mask.back() = true;

  std::vector<std::uint32_t> indices;
  for (std::size_t i = 0; i < length; ++i) {
    if (mask[i]) indices.push_back(static_cast<std::uint32_t>(i));
  }
  return ProtectedSet(std::move(indices), length);
}

/// Full keyframe pass: trace, threshold, peaks, protected set.
inline SaliencyResult analyze(const Segment& segment, const SaliencyConfig& config) {
  auto trace = saliency_trace(segment, config);
  trace.threshold = robust_threshold(trace.values, config.kappa);
  trace.peaks = detect_peaks(trace.values, trace.threshold, config.stride);
  const double fs = segment.sample_rate();
  auto set = build_protected_set(trace.peaks, trace.values, config.rho_samples(fs), config.phi,
                                 segment.length());
  return SaliencyResult{std::move(trace), std::move(set)};
}

}  // namespace saliency
}  // namespace adacore
