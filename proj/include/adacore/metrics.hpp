#pragma once

// Reconstruction fidelity (Pearson r, SNR, Welch-PSD cosine) and continual
// learning metrics: plasticity (ACC, MF1) on the current subject, stability
// (AAA, AAF1) on not-yet-adapted subjects. Aggregates are percentages.

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <map>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "adacore/dsp.hpp"
#include "adacore/errors.hpp"
#include "adacore/types.hpp"

namespace adacore::metrics {

inline constexpr double kSnrCapDb = 100.0;

/// Sample Pearson correlation; 0 when either input has zero variance.
template <std::floating_point T, std::floating_point U>
double pearson_r(std::span<const T> x, std::span<const U> y) {
  if (x.size() != y.size()) throw LengthError("pearson_r needs equal lengths");
  if (x.size() < 2) throw LengthError("pearson_r needs at least two samples");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double a = x[i] - mx, b = y[i] - my;
    sxy += a * b;
    sxx += a * a;
    syy += b * b;
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

/// 10 log10(sum x^2 / sum (x - x~)^2), clamped to [-100, 100] dB.
template <std::floating_point T, std::floating_point U>
double snr_db(std::span<const T> x, std::span<const U> y) {
  if (x.size() != y.size()) throw LengthError("snr_db needs equal lengths");
  double signal = 0.0, error = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    signal += static_cast<double>(x[i]) * x[i];
    const double e = static_cast<double>(x[i]) - static_cast<double>(y[i]);
    error += e * e;
  }
  if (error == 0.0) return kSnrCapDb;
  if (signal == 0.0) return -kSnrCapDb;
  return std::clamp(10.0 * std::log10(signal / error), -kSnrCapDb, kSnrCapDb);
}

/// Cosine similarity of Welch spectra; 1 when both spectra vanish, 0 when
/// only one does.
template <std::floating_point T, std::floating_point U>
double psd_cosine(std::span<const T> x, std::span<const U> y, double sample_rate) {
  if (x.size() != y.size()) throw LengthError("psd_cosine needs equal lengths");
  const auto px = dsp::welch_psd(x, sample_rate).power;
  const auto py = dsp::welch_psd(y, sample_rate).power;
  double dot = 0.0, nx = 0.0, ny = 0.0;
  for (std::size_t i = 0; i < px.size(); ++i) {
    dot += px[i] * py[i];
    nx += px[i] * px[i];
    ny += py[i] * py[i];
  }
  if (nx == 0.0 && ny == 0.0) return 1.0;
  if (nx == 0.0 || ny == 0.0) return 0.0;
  return std::clamp(dot / std::sqrt(nx * ny), 0.0, 1.0);
}

struct FidelityReport {
  std::vector<double> pearson;
  std::vector<double> snr_db;
  std::vector<double> psd_cosine;
  double mean_pearson = 0.0;
  double mean_snr_db = 0.0;
  double mean_psd_cosine = 0.0;
  double realized_keep_ratio = 0.0;
};

/// Per-channel fidelity over samples [margin, N - margin).
inline FidelityReport fidelity(const Segment& original, const Segment& reconstructed,
                               std::size_t margin = 0) {
  if (original.channels() != reconstructed.channels() || original.length() != reconstructed.length()) {
    throw LengthError("fidelity needs segments of identical shape");
  }
  const std::size_t n = original.length();
  if (2 * margin >= n) throw LengthError("interior margin leaves no samples");
  FidelityReport r;
  const std::size_t len = n - 2 * margin;
  for (std::size_t c = 0; c < original.channels(); ++c) {
    const auto a = original.channel(c).subspan(margin, len);
    const auto b = reconstructed.channel(c).subspan(margin, len);
    r.pearson.push_back(pearson_r(a, b));
    r.snr_db.push_back(snr_db(a, b));
    r.psd_cosine.push_back(len >= 16 ? psd_cosine(a, b, original.sample_rate()) : 1.0);
  }
  auto mean = [](const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
  };
  r.mean_pearson = mean(r.pearson);
  r.mean_snr_db = mean(r.snr_db);
  r.mean_psd_cosine = mean(r.psd_cosine);
  return r;
}

/// Fraction of pairs with predicted == truth.
inline double accuracy(std::span<const LabelPair> pairs) {
  if (pairs.empty()) throw LengthError("accuracy of an empty record");
  std::size_t hit = 0;
  for (const auto& p : pairs) hit += p.predicted == p.truth ? 1 : 0;
  return static_cast<double>(hit) / static_cast<double>(pairs.size());
}

/// Unweighted mean of per-class F1 over classes that occur in either the
/// predictions or the truth.
inline double macro_f1(std::span<const LabelPair> pairs) {
  if (pairs.empty()) throw LengthError("macro-F1 of an empty record");
  std::map<int, std::size_t> tp, fp, fn;
  std::set<int> classes;
  for (const auto& p : pairs) {
    classes.insert(p.predicted);
    classes.insert(p.truth);
    if (p.predicted == p.truth) {
      ++tp[p.predicted];
    } else {
      ++fp[p.predicted];
      ++fn[p.truth];
    }
  }
  double sum = 0.0;
  for (int c : classes) {
    const double t = static_cast<double>(tp[c]);
    sum += 2.0 * t / (2.0 * t + static_cast<double>(fp[c]) + static_cast<double>(fn[c]));
  }
  return sum / static_cast<double>(classes.size());
}

struct PlasticityResult {
  double acc = 0.0;  // percent
  double mf1 = 0.0;  // percent
};

struct StabilityResult {
  double aaa = 0.0;   // percent
  double aaf1 = 0.0;  // percent
};

namespace detail {

// All pairs recorded for (step, subject), concatenated across records.
inline std::map<std::pair<std::size_t, std::size_t>, std::vector<LabelPair>> group(const PredictionLog& log) {
  std::map<std::pair<std::size_t, std::size_t>, std::vector<LabelPair>> g;
  for (const auto& r : log.records) {
    auto& v = g[{r.step, r.subject}];
    v.insert(v.end(), r.pairs.begin(), r.pairs.end());
  }
  return g;
}

inline const std::vector<LabelPair>& require(
    const std::map<std::pair<std::size_t, std::size_t>, std::vector<LabelPair>>& g, std::size_t t,
    std::size_t s) {
  const auto it = g.find({t, s});
  if (it == g.end() || it->second.empty()) {
    throw IncompleteLogError("no predictions for step " + std::to_string(t) + " on subject " +
                             std::to_string(s));
  }
  return it->second;
}

}  // namespace detail

/// ACC and MF1: mean over t = 1..T of the step-t score on subject t.
inline PlasticityResult plasticity(const PredictionLog& log) {
  if (log.steps < 1) throw IncompleteLogError("log has no adaptation steps");
  const auto g = detail::group(log);
  double acc = 0.0, f1 = 0.0;
  for (std::size_t t = 1; t <= log.steps; ++t) {
    const auto& pairs = detail::require(g, t, t);
    acc += accuracy(pairs);
    f1 += macro_f1(pairs);
  }
  const double steps = static_cast<double>(log.steps);
  return {100.0 * acc / steps, 100.0 * f1 / steps};
}

/// AAA and AAF1: mean over t = 1..T-1 of the mean score of model t on the
/// subjects s > t.
inline StabilityResult stability(const PredictionLog& log) {
  if (log.steps < 2) throw IncompleteLogError("stability needs at least two steps");
  const auto g = detail::group(log);
  double acc = 0.0, f1 = 0.0;
  for (std::size_t t = 1; t < log.steps; ++t) {
    double step_acc = 0.0, step_f1 = 0.0;
    for (std::size_t s = t + 1; s <= log.steps; ++s) {
      const auto& pairs = detail::require(g, t, s);
      step_acc += accuracy(pairs);
      step_f1 += macro_f1(pairs);
    }
    const double future = static_cast<double>(log.steps - t);
    acc += step_acc / future;
    f1 += step_f1 / future;
  }
  const double steps = static_cast<double>(log.steps - 1);
  return {100.0 * acc / steps, 100.0 * f1 / steps};
}

}  // namespace adacore::metrics
