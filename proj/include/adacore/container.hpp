#pragma once

// Binary formats, all little-endian.
//
// .adcr container (28-byte header):
//   magic "ADCR" | version u16 = 1 | N u32 | C u16 | Fs f32 | u u16 | d u16 |
//   |P| u32 | Ñ u32
//   then |P| x u32 protected indices (ascending),
//   then |P| x C f32 verbatim samples (index-major),
//   then C x Ñ f32 low-rate samples (channel-major).
//
// Raw segment (10-byte header):
//   N u32 | C u16 | Fs f32, then C x N f32 samples (channel-major).

#include <array>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

#include "adacore/errors.hpp"
#include "adacore/types.hpp"

namespace adacore::container {

inline constexpr std::array<char, 4> kMagic{'A', 'D', 'C', 'R'};
inline constexpr std::uint16_t kVersion = 1;
inline constexpr std::size_t kHeaderSize = 28;
inline constexpr std::size_t kRawHeaderSize = 10;

namespace detail {

class Writer {
 public:
  template <typename T>
  void le(T value) {
    using U = std::conditional_t<sizeof(T) == 2, std::uint16_t, std::uint32_t>;
    static_assert(sizeof(T) == 2 || sizeof(T) == 4);
    const U bits = std::bit_cast<U>(value);
    for (std::size_t i = 0; i < sizeof(T); ++i) out_.push_back(static_cast<std::byte>((bits >> (8 * i)) & 0xFF));
  }
  void bytes(std::span<const char> s) {
    for (char ch : s) out_.push_back(static_cast<std::byte>(ch));
  }
  std::vector<std::byte> take() { return std::move(out_); }

 private:
  std::vector<std::byte> out_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::byte> in) : in_(in) {}

  template <typename T>
  T le(const char* field) {
    using U = std::conditional_t<sizeof(T) == 2, std::uint16_t, std::uint32_t>;
    need(sizeof(T), field);
    U bits = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      bits |= static_cast<U>(static_cast<U>(std::to_integer<unsigned>(in_[pos_ + i])) << (8 * i));
    }
    pos_ += sizeof(T);
    return std::bit_cast<T>(bits);
  }

  void need(std::size_t n, const char* field) const {
    if (in_.size() - pos_ < n) {
      throw FormatError(std::string("truncated stream reading ") + field, pos_);
    }
  }
  std::size_t remaining() const { return in_.size() - pos_; }
  std::size_t position() const { return pos_; }
  std::span<const std::byte> peek(std::size_t n) const { return in_.subspan(pos_, n); }

 private:
  std::span<const std::byte> in_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline std::size_t serialized_size(const CompressedSegment& cs) {
  const std::size_t p = cs.protected_indices.size();
  return kHeaderSize + 4 * p + 4 * p * cs.channels + 4 * cs.low_rate_length * cs.channels;
}

inline std::vector<std::byte> serialize(const CompressedSegment& cs) {
  constexpr auto u16max = std::numeric_limits<std::uint16_t>::max();
  constexpr auto u32max = std::numeric_limits<std::uint32_t>::max();
  if (cs.length > u32max || cs.channels > u16max || cs.rate.num > u16max || cs.rate.den > u16max ||
      cs.protected_indices.size() > u32max || cs.low_rate_length > u32max) {
    throw ParameterError("container field out of range");
  }
  if (cs.low_rate.size() != cs.low_rate_length * cs.channels ||
      cs.verbatim.size() != cs.protected_indices.size() * cs.channels) {
    throw LengthError("container payload sizes do not match its header");
  }
  detail::Writer w;
  w.bytes(kMagic);
  w.le<std::uint16_t>(kVersion);
  w.le<std::uint32_t>(static_cast<std::uint32_t>(cs.length));
  w.le<std::uint16_t>(static_cast<std::uint16_t>(cs.channels));
  w.le<float>(cs.sample_rate);
  w.le<std::uint16_t>(static_cast<std::uint16_t>(cs.rate.num));
  w.le<std::uint16_t>(static_cast<std::uint16_t>(cs.rate.den));
  w.le<std::uint32_t>(static_cast<std::uint32_t>(cs.protected_indices.size()));
  w.le<std::uint32_t>(static_cast<std::uint32_t>(cs.low_rate_length));
  for (auto t : cs.protected_indices) w.le<std::uint32_t>(t);
  for (float v : cs.verbatim) w.le<float>(v);
  for (float v : cs.low_rate) w.le<float>(v);
  return w.take();
}

/// Structural decoding only: payload sizes follow the header. Semantic
/// consistency (Ñ vs N*u/d, keyframe order) is left to reconstruct().
inline CompressedSegment deserialize(std::span<const std::byte> bytes) {
  detail::Reader r(bytes);
  r.need(4, "magic");
  if (std::memcmp(r.peek(4).data(), kMagic.data(), 4) != 0) throw FormatError("bad magic", 0);
  r.le<std::uint32_t>("magic");
  const auto version = r.le<std::uint16_t>("version");
  if (version != kVersion) {
    throw FormatError("unsupported container version " + std::to_string(version), 4);
  }
  CompressedSegment cs;
  cs.length = r.le<std::uint32_t>("N");
  cs.channels = r.le<std::uint16_t>("C");
  if (cs.length < 2) throw FormatError("container describes fewer than 2 samples", 6);
  if (cs.channels < 1) throw FormatError("container describes no channels", 10);
  cs.sample_rate = r.le<float>("Fs");
  cs.rate.num = r.le<std::uint16_t>("u");
  cs.rate.den = r.le<std::uint16_t>("d");
  const std::size_t p = r.le<std::uint32_t>("|P|");
  cs.low_rate_length = r.le<std::uint32_t>("y length");

  // Check the payload size before allocating anything.
  const auto need = [&](std::size_t count, const char* field) {
    if (count > r.remaining() / 4) throw FormatError(std::string("truncated stream reading ") + field, r.position());
  };
  need(p, "protected indices");
  cs.protected_indices.resize(p);
  for (auto& t : cs.protected_indices) t = r.le<std::uint32_t>("protected indices");
  need(p * cs.channels, "verbatim samples");
  cs.verbatim.resize(p * cs.channels);
  for (auto& v : cs.verbatim) v = r.le<float>("verbatim samples");
  need(cs.low_rate_length * cs.channels, "low-rate samples");
  cs.low_rate.resize(cs.low_rate_length * cs.channels);
  for (auto& v : cs.low_rate) v = r.le<float>("low-rate samples");
  if (r.remaining() != 0) throw FormatError("trailing bytes after container", r.position());
  return cs;
}

inline std::vector<std::byte> encode_raw(const Segment& s) {
  if (s.length() > std::numeric_limits<std::uint32_t>::max() ||
      s.channels() > std::numeric_limits<std::uint16_t>::max()) {
    throw ParameterError("segment too large for the raw format");
  }
  detail::Writer w;
  w.le<std::uint32_t>(static_cast<std::uint32_t>(s.length()));
  w.le<std::uint16_t>(static_cast<std::uint16_t>(s.channels()));
  w.le<float>(s.sample_rate());
  for (float v : s.data()) w.le<float>(v);
  return w.take();
}

inline Segment decode_raw(std::span<const std::byte> bytes) {
  detail::Reader r(bytes);
  const std::size_t n = r.le<std::uint32_t>("N");
  const std::size_t c = r.le<std::uint16_t>("C");
  const float fs = r.le<float>("Fs");
  if (n < 2 || c < 1) throw FormatError("raw segment needs N >= 2 and C >= 1", 0);
  if (!(fs > 0.0f) || !std::isfinite(fs)) throw FormatError("raw segment sample rate invalid", 6);
  if (n * c > r.remaining() / 4) throw FormatError("truncated raw segment", r.position());
  std::vector<float> data(n * c);
  for (auto& v : data) {
    const auto at = r.position();
    v = r.le<float>("samples");
    if (!std::isfinite(v)) throw FormatError("non-finite sample", at);
  }
  if (r.remaining() != 0) throw FormatError("trailing bytes after raw segment", r.position());
  return Segment(c, n, fs, std::move(data));
}

inline std::vector<std::byte> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::vector<char> raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  std::vector<std::byte> out(raw.size());
  std::memcpy(out.data(), raw.data(), raw.size());
  return out;
}

inline void write_file(const std::filesystem::path& path, std::span<const std::byte> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace adacore::container
