#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

namespace segconf {

/// Base of every exception thrown by the toolkit.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Bad arguments, shape mismatches, invariant violations. CLI exit code 1.
class ValidationError : public Error {
public:
  using Error::Error;
};

/// A scorer asked to do something its capability flags do not allow.
class CapabilityError : public ValidationError {
public:
  using ValidationError::ValidationError;
};

/// Filesystem failure. Carries the offending path. CLI exit code 2.
class IoError : public Error {
public:
  IoError(const std::filesystem::path& path, const std::string& what)
      : Error(path.string() + ": " + what), path_(path) {}

  const std::filesystem::path& path() const noexcept { return path_; }

private:
  std::filesystem::path path_;
};

enum class FormatErrorKind {
  malformed_header,
  unsupported_channels,
  truncated_payload,
  non_finite_value,
  out_of_range_value,
  bad_maxval,
};

/// Malformed PFM/PGM content.
class FormatError : public IoError {
public:
  FormatError(const std::filesystem::path& path, FormatErrorKind kind, const std::string& what)
      : IoError(path, what), kind_(kind) {}

  FormatErrorKind kind() const noexcept { return kind_; }

private:
  FormatErrorKind kind_;
};

/// A scorer failed while producing a map; `entry` is the catalog entry or
/// trial index being scored.
class ScorerError : public Error {
public:
  ScorerError(std::size_t entry, const std::string& detail)
      : Error("entry " + std::to_string(entry) + ": " + detail), entry_(entry), detail_(detail) {}

  std::size_t entry() const noexcept { return entry_; }
  const std::string& detail() const noexcept { return detail_; }

private:
  std::size_t entry_;
  std::string detail_;
};

enum class ProtocolErrorKind {
  launch_failed,
  nonzero_exit,
  missing_status,
  malformed_status,
  status_error,
  missing_output,
  malformed_output,
  dimension_mismatch,
  out_of_range_value,
};

std::string_view to_string(ProtocolErrorKind kind);

/// The external scorer process broke the job-directory protocol. CLI exit code 2.
class ProtocolError : public Error {
public:
  ProtocolError(ProtocolErrorKind kind, const std::string& what) : Error(what), kind_(kind) {}

  ProtocolErrorKind kind() const noexcept { return kind_; }

private:
  ProtocolErrorKind kind_;
};

}  // namespace segconf
