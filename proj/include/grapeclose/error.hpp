#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace grapeclose {

enum class ErrorKind {
  kFormat,      // malformed input bytes (JSON, NPY, RLE strings, CSV)
  kValidation,  // well-formed input violating a data invariant
  kArgument,    // caller passed an invalid parameter
  kRange,       // numeric value outside its admissible range
  kEmptyMask,   // operation requires a nonempty mask
  kFitFailure,  // numerical optimization could not produce a valid model
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class FormatError : public Error {
 public:
  explicit FormatError(const std::string& what,
                       std::optional<std::size_t> byte_offset = std::nullopt)
      : Error(ErrorKind::kFormat, what), byte_offset_(byte_offset) {}

  /// Position in the input stream where decoding failed, when known.
  std::optional<std::size_t> byte_offset() const noexcept {
    return byte_offset_;
  }

 private:
  std::optional<std::size_t> byte_offset_;
};

class ValidationError : public Error {
 public:
  ValidationError(const std::string& what, std::vector<std::string> violations,
                  std::vector<std::int64_t> offending_ids = {})
      : Error(ErrorKind::kValidation, what),
        violations_(std::move(violations)),
        offending_ids_(std::move(offending_ids)) {}

  const std::vector<std::string>& violations() const noexcept {
    return violations_;
  }
  const std::vector<std::int64_t>& offending_ids() const noexcept {
    return offending_ids_;
  }

 private:
  std::vector<std::string> violations_;
  std::vector<std::int64_t> offending_ids_;
};

class ArgumentError : public Error {
 public:
  explicit ArgumentError(const std::string& what)
      : Error(ErrorKind::kArgument, what) {}
};

class RangeError : public Error {
 public:
  explicit RangeError(const std::string& what)
      : Error(ErrorKind::kRange, what) {}
};

class EmptyMaskError : public Error {
 public:
  explicit EmptyMaskError(const std::string& what)
      : Error(ErrorKind::kEmptyMask, what) {}
};

class FitFailure : public Error {
 public:
  explicit FitFailure(const std::string& what)
      : Error(ErrorKind::kFitFailure, what) {}
};

}  // namespace grapeclose
