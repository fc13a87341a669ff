#pragma once

// Shared domain types and storage-cost accounting.
//
// All signal data is IEEE-754 binary32, channel-major. Segment and
// ProtectedSet validate on construction and are immutable afterwards.
// CompressedSegment is a plain record: it may hold inconsistent metadata
// after decoding an untrusted container, and reconstruct() is responsible
// for detecting that.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "adacore/errors.hpp"

namespace adacore {

class Segment {
 public:
  Segment(std::size_t channels, std::size_t length, float sample_rate,
          std::vector<float> data)
      : channels_(channels),
        length_(length),
        sample_rate_(sample_rate),
        data_(std::move(data)) {
    if (channels_ < 1) throw ParameterError("segment needs at least one channel");
    if (length_ < 2) throw LengthError("segment needs at least two samples");
    if (!(sample_rate_ > 0.0f) || !std::isfinite(sample_rate_)) {
      throw ParameterError("sample rate must be positive and finite");
    }
    if (data_.size() != channels_ * length_) {
      throw LengthError("segment data size does not match channels x length");
    }
    if (!std::all_of(data_.begin(), data_.end(), [](float v) { return std::isfinite(v); })) {
      throw ParameterError("segment contains non-finite samples");
    }
  }

  static Segment zeros(std::size_t channels, std::size_t length, float sample_rate) {
    return Segment(channels, length, sample_rate, std::vector<float>(channels * length, 0.0f));
  }

  std::size_t channels() const noexcept { return channels_; }
  std::size_t length() const noexcept { return length_; }
  float sample_rate() const noexcept { return sample_rate_; }

  std::span<const float> data() const noexcept { return data_; }
  std::span<const float> channel(std::size_t c) const {
    return std::span<const float>(data_).subspan(c * length_, length_);
  }
  float at(std::size_t c, std::size_t n) const { return data_[c * length_ + n]; }

  friend bool operator==(const Segment&, const Segment&) = default;

 private:
  std::size_t channels_;
  std::size_t length_;
  float sample_rate_;
  std::vector<float> data_;
};

/// Sorted keyframe indices of one segment; always contains both endpoints.
class ProtectedSet {
 public:
  ProtectedSet(std::vector<std::uint32_t> indices, std::size_t segment_length)
      : indices_(std::move(indices)), length_(segment_length) {
    if (length_ < 2) throw LengthError("protected set needs segment length >= 2");
    if (indices_.size() < 2 || indices_.front() != 0 || indices_.back() != length_ - 1) {
      throw ParameterError("protected set must contain both endpoints");
    }
    for (std::size_t i = 1; i < indices_.size(); ++i) {
      if (indices_[i] <= indices_[i - 1]) {
        throw ParameterError("protected indices must be strictly increasing");
      }
    }
  }

  static ProtectedSet endpoints_only(std::size_t segment_length) {
    return ProtectedSet({0u, static_cast<std::uint32_t>(segment_length - 1)}, segment_length);
  }

  std::span<const std::uint32_t> indices() const noexcept { return indices_; }
  std::size_t size() const noexcept { return indices_.size(); }
  std::size_t segment_length() const noexcept { return length_; }
  bool contains(std::uint32_t index) const {
    return std::binary_search(indices_.begin(), indices_.end(), index);
  }

  friend bool operator==(const ProtectedSet&, const ProtectedSet&) = default;

 private:
  std::vector<std::uint32_t> indices_;
  std::size_t length_;
};

/// Resampling rate num/den. Compression uses num <= den; the adjoint swaps
/// the roles. Decoded containers may carry rates that fail valid().
struct RationalRate {
  std::uint32_t num = 1;
  std::uint32_t den = 1;

  static RationalRate make(std::uint32_t u, std::uint32_t d) {
    RationalRate rate{u, d};
    if (!rate.valid()) throw ParameterError("rate must be a reduced fraction with u, d >= 1");
    return rate;
  }

  bool valid() const noexcept { return num >= 1 && den >= 1 && std::gcd(num, den) == 1; }
  double value() const noexcept { return static_cast<double>(num) / static_cast<double>(den); }
  RationalRate swapped() const noexcept { return {den, num}; }

  friend bool operator==(const RationalRate&, const RationalRate&) = default;
};

/// ceil(length * num / den) without floating point.
inline std::size_t resampled_length(std::size_t length, RationalRate rate) {
  const auto n = static_cast<unsigned long long>(length) * rate.num;
  return static_cast<std::size_t>((n + rate.den - 1) / rate.den);
}

struct CompressedSegment {
  std::size_t length = 0;    // N, samples in the original segment
  std::size_t channels = 0;  // C
  float sample_rate = 0.0f;
  RationalRate rate;
  std::size_t low_rate_length = 0;             // Ñ
  std::vector<float> low_rate;                 // C x Ñ, channel-major
  std::vector<std::uint32_t> protected_indices;
  std::vector<float> verbatim;                 // |P| x C, index-major

  std::span<const float> low_rate_channel(std::size_t c) const {
    return std::span<const float>(low_rate).subspan(c * low_rate_length, low_rate_length);
  }

  friend bool operator==(const CompressedSegment&, const CompressedSegment&) = default;
};

/// Stored scalars: (Ñ + |P|) * C.
inline std::size_t cost(const CompressedSegment& c) {
  return (c.low_rate_length + c.protected_indices.size()) * c.channels;
}

enum class Provenance { true_labeled, pseudo_labeled };

inline const char* to_string(Provenance p) {
  return p == Provenance::true_labeled ? "true" : "pseudo";
}

struct BufferEntry {
  CompressedSegment payload;
  int label = 0;
  Provenance provenance = Provenance::true_labeled;
  std::vector<double> window_confidences;  // one per non-overlapping window, in [0, 1]
  std::vector<double> feature;             // frozen embedding, supplied by the caller
  std::string tag;                         // caller's identifier, never interpreted
};

inline std::size_t cost(const BufferEntry& e) { return cost(e.payload); }

struct LabelPair {
  int predicted = 0;
  int truth = 0;
};

/// Predictions of the model after adaptation step `step` on subject `subject`.
/// Steps and subjects are 1-based.
struct PredictionRecord {
  std::size_t step = 0;
  std::size_t subject = 0;
  std::vector<LabelPair> pairs;
};

struct PredictionLog {
  std::size_t steps = 0;  // T
  std::vector<PredictionRecord> records;
};

}  // namespace adacore
