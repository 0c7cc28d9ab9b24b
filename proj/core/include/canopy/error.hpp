#pragma once

#include <stdexcept>
#include <string>

namespace canopy {

/// Base for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or truncated file contents.
class FormatError : public Error {
 public:
  FormatError(const std::string& what, std::size_t byte_offset)
      : Error(what + " (at byte offset " + std::to_string(byte_offset) + ")"),
        offset_(byte_offset) {}
  explicit FormatError(const std::string& what) : Error(what) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_ = 0;
};

/// Precondition or invariant violated by caller-supplied data or config.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Feature manifest of the input does not match what a model was trained on.
class ManifestMismatch : public Error {
 public:
  using Error::Error;
};

}  // namespace canopy
