#pragma once

// Signal kernels shared by saliency, resampling and the fidelity metrics:
// Kaiser-windowed sinc FIR design, zero-phase FIR filtering, FFT analytic
// envelope, Teager-Kaiser energy, centered moving average and Welch PSD.
//
// Every kernel accepts any floating-point sample type and computes in double.

#include <algorithm>
#include <cmath>
#include <complex>
#include <concepts>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

#include "adacore/detail/fftw.hpp"
#include "adacore/errors.hpp"

namespace adacore::dsp {

/// Linear-phase FIR. Frequencies are normalized (cycles/sample).
struct FirKernel {
  std::vector<double> taps;   // odd length, symmetric
  double cutoff = 0.0;        // upper (low-pass) edge
  double low_cutoff = 0.0;    // lower edge for band-pass kernels, 0 otherwise
  double kaiser_beta = 0.0;

  std::size_t size() const noexcept { return taps.size(); }
  std::size_t group_delay() const noexcept { return (taps.size() - 1) / 2; }
};

inline std::vector<double> kaiser_window(std::size_t length, double beta) {
  std::vector<double> w(length, 1.0);
  if (length == 1) return w;
  const double norm = std::cyl_bessel_i(0.0, beta);
  const double m = static_cast<double>(length - 1);
  for (std::size_t n = 0; n < length; ++n) {
    const double t = 2.0 * static_cast<double>(n) / m - 1.0;
    w[n] = std::cyl_bessel_i(0.0, beta * std::sqrt(std::max(0.0, 1.0 - t * t))) / norm;
  }
  return w;
}

/// Stopband attenuation (dB) implied by a Kaiser beta; inverse of the usual
/// empirical beta(A) rule.
inline double kaiser_attenuation_db(double beta) {
  if (beta <= 0.0) return 21.0;
  if (beta >= 0.1102 * (50.0 - 8.7)) return beta / 0.1102 + 8.7;
  double lo = 21.0, hi = 50.0;
  for (int i = 0; i < 60; ++i) {
    const double a = 0.5 * (lo + hi);
    const double b = 0.5842 * std::pow(a - 21.0, 0.4) + 0.07886 * (a - 21.0);
    (b < beta ? lo : hi) = a;
  }
  return 0.5 * (lo + hi);
}

/// Kaiser's length estimate for a given attenuation and transition width,
/// rounded up to an odd count.
inline std::size_t kaiser_num_taps(double attenuation_db, double transition) {
  if (!(transition > 0.0)) throw ParameterError("transition width must be positive");
  auto n = static_cast<std::size_t>(
               std::ceil((attenuation_db - 7.95) / (14.36 * transition))) + 1;
  n = std::max<std::size_t>(n, 3);
  return n % 2 == 1 ? n : n + 1;
}

namespace detail {

// Windowed sinc with unity DC gain. cutoff == 0.5 yields a unit impulse.
inline std::vector<double> windowed_sinc(double cutoff, std::size_t num_taps, double beta) {
  const auto w = kaiser_window(num_taps, beta);
  const double center = static_cast<double>(num_taps - 1) / 2.0;
  std::vector<double> h(num_taps);
  double sum = 0.0;
  for (std::size_t n = 0; n < num_taps; ++n) {
    const double t = static_cast<double>(n) - center;
    const double s = t == 0.0 ? 2.0 * cutoff
                              : std::sin(2.0 * std::numbers::pi * cutoff * t) / (std::numbers::pi * t);
    h[n] = s * w[n];
    sum += h[n];
  }
  for (auto& v : h) v /= sum;
  // Enforce exact symmetry against rounding in sin().
  for (std::size_t n = 0; n < num_taps / 2; ++n) {
    const double avg = 0.5 * (h[n] + h[num_taps - 1 - n]);
    h[n] = h[num_taps - 1 - n] = avg;
  }
  return h;
}

}  // namespace detail

/// Low-pass of explicit odd length. Accepts cutoff == 0.5 (identity kernel),
/// which the resampler needs for the unit rate.
inline FirKernel design_lowpass_taps(double cutoff, double beta, std::size_t num_taps) {
  if (!(cutoff > 0.0 && cutoff <= 0.5)) throw ParameterError("cutoff must lie in (0, 0.5]");
  if (num_taps % 2 == 0 || num_taps == 0) throw ParameterError("tap count must be odd");
  if (beta < 0.0) throw ParameterError("kaiser beta must be non-negative");
  return FirKernel{detail::windowed_sinc(cutoff, num_taps, beta), cutoff, 0.0, beta};
}

/// Kaiser-windowed sinc low-pass with 2*ceil(taps_per_branch * 0.5/cutoff) + 1
/// taps, i.e. `taps_per_branch` taps per polyphase branch when the cutoff is
/// 0.5/L.
inline FirKernel design_lowpass(double cutoff, double beta, std::size_t taps_per_branch) {
  if (!(cutoff > 0.0 && cutoff < 0.5)) throw ParameterError("cutoff must lie in (0, 0.5)");
  if (taps_per_branch < 4) throw ParameterError("taps_per_branch must be >= 4");
  const auto half = static_cast<std::size_t>(
      std::ceil(static_cast<double>(taps_per_branch) * 0.5 / cutoff - 1e-9));
  return design_lowpass_taps(cutoff, beta, 2 * half + 1);
}

/// Tap count for a band-pass on [low, high]: Kaiser estimate with the widest
/// transition that keeps DC and Nyquist out of the passband.
inline std::size_t bandpass_num_taps(double low, double high, double beta) {
  const double transition = std::min({2.0 * low, high - low, 2.0 * (0.5 - high)});
  return kaiser_num_taps(kaiser_attenuation_db(beta), transition);
}

/// Band-pass as the difference of two unity-DC low-passes of equal length,
/// so DC gain is exactly zero.
inline FirKernel design_bandpass(double low, double high, double beta, std::size_t num_taps) {
  if (!(low > 0.0 && low < high && high < 0.5)) {
    throw ParameterError("band-pass edges must satisfy 0 < low < high < 0.5");
  }
  if (num_taps % 2 == 0) throw ParameterError("tap count must be odd");
  auto h = detail::windowed_sinc(high, num_taps, beta);
  const auto l = detail::windowed_sinc(low, num_taps, beta);
  for (std::size_t i = 0; i < num_taps; ++i) h[i] -= l[i];
  return FirKernel{std::move(h), high, low, beta};
}

/// Frequency response magnitude |H(f)| of a kernel at normalized frequency f.
inline double magnitude_response(const FirKernel& k, double f) {
  std::complex<double> acc{0.0, 0.0};
  for (std::size_t n = 0; n < k.taps.size(); ++n) {
    acc += k.taps[n] * std::polar(1.0, -2.0 * std::numbers::pi * f * static_cast<double>(n));
  }
  return std::abs(acc);
}

namespace detail {

inline std::vector<double> causal_fir(std::span<const double> x, std::span<const double> h) {
  std::vector<double> y(x.size(), 0.0);
  for (std::size_t n = 0; n < x.size(); ++n) {
    const std::size_t kmax = std::min(h.size() - 1, n);
    double acc = 0.0;
    for (std::size_t k = 0; k <= kmax; ++k) acc += h[k] * x[n - k];
    y[n] = acc;
  }
  return y;
}

}  // namespace detail

/// Zero-phase forward-backward FIR filtering with odd reflection padding of
/// one kernel length at each edge.
template <std::floating_point T>
std::vector<double> filtfilt(std::span<const T> x, const FirKernel& kernel) {
  const std::size_t n = x.size();
  const std::size_t pad = kernel.size();
  if (n <= 3 * pad) throw LengthError("filtfilt needs more than 3x the tap count");

  std::vector<double> ext(n + 2 * pad);
  const double first = x.front(), last = x.back();
  for (std::size_t k = 0; k < pad; ++k) {
    ext[pad - 1 - k] = 2.0 * first - static_cast<double>(x[k + 1]);
    ext[pad + n + k] = 2.0 * last - static_cast<double>(x[n - 2 - k]);
  }
  for (std::size_t i = 0; i < n; ++i) ext[pad + i] = x[i];

  auto fwd = detail::causal_fir(ext, kernel.taps);
  std::reverse(fwd.begin(), fwd.end());
  auto bwd = detail::causal_fir(fwd, kernel.taps);
  std::reverse(bwd.begin(), bwd.end());
  return {bwd.begin() + static_cast<std::ptrdiff_t>(pad),
          bwd.begin() + static_cast<std::ptrdiff_t>(pad + n)};
}

/// |x + j H{x}| via the FFT analytic signal.
template <std::floating_point T>
std::vector<double> hilbert_envelope(std::span<const T> x) {
  const std::size_t n = x.size();
  if (n < 8) throw LengthError("hilbert envelope needs at least 8 samples");
  auto spec = adacore::detail::dft_real(x);
  // DC (and Nyquist for even n) stay unscaled; positive bins doubled.
  const std::size_t positive_end = (n % 2 == 0) ? n / 2 : (n + 1) / 2;
  for (std::size_t k = 1; k < positive_end; ++k) spec[k] *= 2.0;
  for (std::size_t k = (n % 2 == 0) ? n / 2 + 1 : positive_end; k < n; ++k) spec[k] = 0.0;
  const auto z = adacore::detail::dft(spec, true);
  std::vector<double> e(n);
  for (std::size_t i = 0; i < n; ++i) e[i] = std::abs(z[i]) / static_cast<double>(n);
  return e;
}

/// Half-wave rectified Teager-Kaiser energy; both endpoints are 0.
template <std::floating_point T>
std::vector<double> teager_kaiser(std::span<const T> x) {
  const std::size_t n = x.size();
  if (n < 3) throw LengthError("teager-kaiser needs at least 3 samples");
  std::vector<double> psi(n, 0.0);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double c = x[i];
    const double v = c * c - static_cast<double>(x[i - 1]) * static_cast<double>(x[i + 1]);
    psi[i] = v > 0.0 ? v : 0.0;
  }
  return psi;
}

/// Centered moving mean over `window` samples; windows shrink at the edges.
/// Even windows extend one sample further to the right.
template <std::floating_point T>
std::vector<double> moving_average(std::span<const T> x, std::size_t window) {
  const std::size_t n = x.size();
  if (window < 1 || window > n) throw ParameterError("moving average window out of range");
  std::vector<double> prefix(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + static_cast<double>(x[i]);
  const std::size_t left = (window - 1) / 2;
  const std::size_t right = window - 1 - left;
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t a = i >= left ? i - left : 0;
    const std::size_t b = std::min(n - 1, i + right);
    y[i] = (prefix[b + 1] - prefix[a]) / static_cast<double>(b - a + 1);
  }
  return y;
}

struct PowerSpectrum {
  std::vector<double> frequencies;  // Hz
  std::vector<double> power;        // one-sided density, units^2 / Hz
};

/// Welch estimate: periodic Hann window, segment length min(256, N), 50%
/// overlap, per-segment mean removal, mean of one-sided periodograms.
template <std::floating_point T>
PowerSpectrum welch_psd(std::span<const T> x, double sample_rate) {
  const std::size_t n = x.size();
  if (n < 16) throw LengthError("welch psd needs at least 16 samples");
  if (!(sample_rate > 0.0)) throw ParameterError("sample rate must be positive");
  const std::size_t seg = std::min<std::size_t>(256, n);
  const std::size_t hop = seg / 2;
  const std::size_t count = (n - seg) / hop + 1;

  std::vector<double> window(seg);
  double window_power = 0.0;
  for (std::size_t i = 0; i < seg; ++i) {
    window[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                     static_cast<double>(seg));
    window_power += window[i] * window[i];
  }

  const std::size_t bins = seg / 2 + 1;
  PowerSpectrum out;
  out.frequencies.resize(bins);
  out.power.assign(bins, 0.0);
  for (std::size_t k = 0; k < bins; ++k) {
    out.frequencies[k] = sample_rate * static_cast<double>(k) / static_cast<double>(seg);
  }

  std::vector<std::complex<double>> frame(seg);
  for (std::size_t s = 0; s < count; ++s) {
    const std::size_t off = s * hop;
    double mean = 0.0;
    for (std::size_t i = 0; i < seg; ++i) mean += static_cast<double>(x[off + i]);
    mean /= static_cast<double>(seg);
    for (std::size_t i = 0; i < seg; ++i) {
      frame[i] = (static_cast<double>(x[off + i]) - mean) * window[i];
    }
    const auto spec = adacore::detail::dft(frame, false);
    for (std::size_t k = 0; k < bins; ++k) {
      double p = std::norm(spec[k]) / (sample_rate * window_power);
      const bool unpaired = k == 0 || (seg % 2 == 0 && k == seg / 2);
      if (!unpaired) p *= 2.0;
      out.power[k] += p;
    }
  }
  for (auto& p : out.power) p /= static_cast<double>(count);
  return out;
}

}  // namespace adacore::dsp
