#pragma once

// Thin RAII layer over FFTW's complex DFT. Plan creation and destruction
// are not thread-safe in FFTW, so both go through one process-wide mutex;
// executing a plan is safe.

#include <fftw3.h>

#include <complex>
#include <cstddef>
#include <memory>
#include <mutex>
#include <new>
#include <span>
#include <vector>

namespace adacore::detail {

inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwFree {
  void operator()(fftw_complex* p) const noexcept { fftw_free(p); }
};

struct FftwPlanDestroy {
  void operator()(fftw_plan_s* p) const noexcept {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(p);
  }
};

using FftwBuffer = std::unique_ptr<fftw_complex[], FftwFree>;
using FftwPlan = std::unique_ptr<fftw_plan_s, FftwPlanDestroy>;

/// Unnormalized complex DFT (forward: exp(-i...), inverse: exp(+i...)).
inline std::vector<std::complex<double>> dft(std::span<const std::complex<double>> input,
                                             bool inverse) {
  const std::size_t n = input.size();
  if (n == 0) return {};
  FftwBuffer buf(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n)));
  if (!buf) throw std::bad_alloc();
  FftwPlan plan;
  {
    std::lock_guard lock(fftw_planner_mutex());
    plan.reset(fftw_plan_dft_1d(static_cast<int>(n), buf.get(), buf.get(),
                                inverse ? FFTW_BACKWARD : FFTW_FORWARD, FFTW_ESTIMATE));
  }
  for (std::size_t i = 0; i < n; ++i) {
    buf[i][0] = input[i].real();
    buf[i][1] = input[i].imag();
  }
  fftw_execute(plan.get());
  std::vector<std::complex<double>> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = {buf[i][0], buf[i][1]};
  return out;
}

template <typename T>
std::vector<std::complex<double>> dft_real(std::span<const T> input) {
  std::vector<std::complex<double>> c(input.size());
  for (std::size_t i = 0; i < input.size(); ++i) c[i] = static_cast<double>(input[i]);
  return dft(c, false);
}

}  // namespace adacore::detail
