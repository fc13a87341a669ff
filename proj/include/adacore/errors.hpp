#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace adacore {

/// Invalid configuration or argument value (cutoff, band, ratio, window...).
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Input too short (or otherwise mis-sized) for the requested operation.
class LengthError : public std::length_error {
 public:
  using std::length_error::length_error;
};

/// Malformed container or raw-segment stream. Carries the byte offset at
/// which decoding stopped.
class FormatError : public std::runtime_error {
 public:
  FormatError(const std::string& what, std::size_t offset)
      : std::runtime_error(what + " (at byte " + std::to_string(offset) + ")"),
        offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

/// A prediction log lacks a (step, subject) record that a metric requires.
class IncompleteLogError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace adacore
