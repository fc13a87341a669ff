#pragma once

// Rational polyphase resampling: zero-stuff by L, low-pass, keep every M-th
// sample, evaluated branch-wise without building the zero-stuffed signal.
//
// The kernel is a Kaiser-windowed sinc with cutoff min(0.5/L, 0.5/M) at the
// upsampled rate, gain L, and 2*ceil(10*max(L, M)) + 1 taps. Its group delay
// is removed so that output sample k sits at input time k*M/L.

#include <algorithm>
#include <concepts>
#include <cstddef>
#include <span>
#include <vector>

#include "adacore/dsp.hpp"
#include "adacore/errors.hpp"
#include "adacore/types.hpp"

namespace adacore::resample {

inline constexpr std::size_t kTapsPerBranch = 10;
inline constexpr double kKaiserBeta = 8.6;

template <typename T>
std::vector<T> upsample(std::span<const T> x, std::size_t factor) {
  if (factor < 1) throw ParameterError("upsampling factor must be >= 1");
  std::vector<T> y(x.size() * factor, T{});
  for (std::size_t n = 0; n < x.size(); ++n) y[n * factor] = x[n];
  return y;
}

template <typename T>
std::vector<T> downsample(std::span<const T> x, std::size_t factor) {
  if (factor < 1) throw ParameterError("downsampling factor must be >= 1");
  std::vector<T> y;
  y.reserve((x.size() + factor - 1) / factor);
  for (std::size_t n = 0; n < x.size(); n += factor) y.push_back(x[n]);
  return y;
}

struct ResamplePlan {
  RationalRate rate;  // num = L (up), den = M (down)
  dsp::FirKernel kernel;
  std::size_t input_length = 0;
  std::size_t output_length = 0;
};

/// Anti-imaging/anti-aliasing kernel for up = L, down = M, scaled by L.
inline dsp::FirKernel resampling_kernel(RationalRate rate) {
  const std::size_t up = rate.num, down = rate.den;
  const double cutoff = std::min(0.5 / static_cast<double>(up), 0.5 / static_cast<double>(down));
  const std::size_t half = kTapsPerBranch * std::max(up, down);
  auto kernel = dsp::design_lowpass_taps(cutoff, kKaiserBeta, 2 * half + 1);
  for (auto& t : kernel.taps) t *= static_cast<double>(up);
  return kernel;
}

inline ResamplePlan make_plan(RationalRate rate, std::size_t input_length) {
  if (!rate.valid()) throw ParameterError("resampling rate must be a reduced fraction");
  return ResamplePlan{rate, resampling_kernel(rate), input_length,
                      resampled_length(input_length, rate)};
}

/// Polyphase evaluation of a prepared plan; output has exactly
/// ceil(N * L / M) samples.
template <std::floating_point T>
std::vector<T> apply(const ResamplePlan& plan, std::span<const T> x) {
  if (x.empty()) throw LengthError("cannot resample an empty sequence");
  if (x.size() != plan.input_length) throw LengthError("input length does not match plan");
  const long long up = plan.rate.num, down = plan.rate.den;
  const auto& h = plan.kernel.taps;
  const long long taps = static_cast<long long>(h.size());
  const long long delay = static_cast<long long>(plan.kernel.group_delay());
  const long long n_in = static_cast<long long>(x.size());

  std::vector<T> y(plan.output_length);
  for (std::size_t k = 0; k < plan.output_length; ++k) {
    // Position on the upsampled grid after delay compensation.
    const long long t = static_cast<long long>(k) * down + delay;
    // Input samples n with 0 <= t - n*up < taps.
    long long n_hi = t / up;
    const long long lo_num = t - taps + 1;
    long long n_lo = lo_num <= 0 ? 0 : (lo_num + up - 1) / up;
    n_hi = std::min(n_hi, n_in - 1);
    double acc = 0.0;
    for (long long n = n_lo; n <= n_hi; ++n) {
      acc += h[static_cast<std::size_t>(t - n * up)] * static_cast<double>(x[static_cast<std::size_t>(n)]);
    }
    y[k] = static_cast<T>(acc);
  }
  return y;
}

/// Resample `x` by num/den of `rate`.
template <std::floating_point T>
std::vector<T> polyphase_resample(std::span<const T> x, RationalRate rate) {
  return resample::apply(make_plan(rate, x.size()), x);
}

}  // namespace adacore::resample
