#include <catch_amalgamated.hpp>

#include <cstring>
#include <filesystem>
#include <random>
#include <vector>

#include "adacore/codec.hpp"
#include "adacore/container.hpp"

using namespace adacore;

namespace {

CompressedSegment sample() {
  std::mt19937_64 rng(8);
  std::normal_distribution<float> g;
  std::vector<float> d(3 * 400);
  for (auto& v : d) v = g(rng);
  const Segment x(3, 400, 250.0f, d);
  const ProtectedSet p({0, 10, 11, 12, 200, 399}, 400);
  return codec::compress_with(x, p, 0.2, 64).compressed;
}

template <typename T>
T read_le(const std::vector<std::byte>& b, std::size_t at) {
  T v;
  std::memcpy(&v, b.data() + at, sizeof(T));
  return v;
}

}  // namespace

TEST_CASE("container layout") {
  const auto cs = sample();
  const auto bytes = container::serialize(cs);
  const std::size_t p = cs.protected_indices.size(), c = cs.channels, nt = cs.low_rate_length;
  CHECK(container::kHeaderSize == 4 + 2 + 4 + 2 + 4 + 2 + 2 + 4 + 4);
  CHECK(bytes.size() == 28 + 4 * p + 4 * p * c + 4 * nt * c);
  CHECK(container::serialized_size(cs) == bytes.size());
  CHECK(std::memcmp(bytes.data(), "ADCR", 4) == 0);
  CHECK(read_le<std::uint16_t>(bytes, 4) == 1);
  CHECK(read_le<std::uint32_t>(bytes, 6) == 400);
  CHECK(read_le<std::uint16_t>(bytes, 10) == 3);
  CHECK(read_le<float>(bytes, 12) == 250.0f);
  CHECK(read_le<std::uint16_t>(bytes, 16) == cs.rate.num);
  CHECK(read_le<std::uint16_t>(bytes, 18) == cs.rate.den);
  CHECK(read_le<std::uint32_t>(bytes, 20) == p);
  CHECK(read_le<std::uint32_t>(bytes, 24) == nt);
  CHECK(read_le<std::uint32_t>(bytes, 28 + 4) == 10);  // second protected index
}

TEST_CASE("container round trip is bit-identical") {
  const auto cs = sample();
  const auto bytes = container::serialize(cs);
  const auto back = container::deserialize(bytes);
  CHECK(back == cs);
  CHECK(container::serialize(back) == bytes);
}

TEST_CASE("corrupt containers raise format errors with offsets") {
  const auto bytes = container::serialize(sample());

  auto magic = bytes;
  magic[0] = std::byte{'X'};
  try {
    container::deserialize(magic);
    FAIL("bad magic accepted");
  } catch (const FormatError& e) {
    CHECK(e.offset() == 0);
  }

  auto version = bytes;
  version[4] = std::byte{9};
  try {
    container::deserialize(version);
    FAIL("bad version accepted");
  } catch (const FormatError& e) {
    CHECK(e.offset() == 4);
  }

  const std::vector<std::byte> short_header(bytes.begin(), bytes.begin() + 20);
  CHECK_THROWS_AS(container::deserialize(short_header), FormatError);
  const std::vector<std::byte> truncated(bytes.begin(), bytes.end() - 1);
  CHECK_THROWS_AS(container::deserialize(truncated), FormatError);
  auto trailing = bytes;
  trailing.push_back(std::byte{0});
  CHECK_THROWS_AS(container::deserialize(trailing), FormatError);
}

TEST_CASE("structurally valid but inconsistent containers still parse") {
  auto cs = sample();
  cs.low_rate_length += 2;
  cs.low_rate.resize(cs.low_rate_length * cs.channels, 0.0f);
  const auto back = container::deserialize(container::serialize(cs));
  CHECK(back.low_rate_length == cs.low_rate_length);
  CHECK(codec::reconstruct(back).used_fallback);
}

TEST_CASE("raw segment format") {
  const Segment x(2, 3, 160.0f, {1, 2, 3, 4, 5, 6});
  const auto bytes = container::encode_raw(x);
  CHECK(bytes.size() == container::kRawHeaderSize + 6 * 4);
  CHECK(read_le<std::uint32_t>(bytes, 0) == 3);
  CHECK(read_le<std::uint16_t>(bytes, 4) == 2);
  CHECK(read_le<float>(bytes, 6) == 160.0f);
  CHECK(read_le<float>(bytes, 10 + 3 * 4) == 4.0f);  // channel-major
  CHECK(container::decode_raw(bytes) == x);

  const std::vector<std::byte> truncated(bytes.begin(), bytes.end() - 2);
  CHECK_THROWS_AS(container::decode_raw(truncated), FormatError);
}

TEST_CASE("file helpers") {
  const auto dir = std::filesystem::temp_directory_path() / "adacore_container_test";
  std::filesystem::create_directories(dir);
  const auto bytes = container::serialize(sample());
  container::write_file(dir / "a.adcr", bytes);
  CHECK(container::read_file(dir / "a.adcr") == bytes);
  CHECK_THROWS(container::read_file(dir / "missing.adcr"));
  std::filesystem::remove_all(dir);
}
