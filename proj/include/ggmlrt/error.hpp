#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ggmlrt {

// Process exit status doubles as the machine-readable error code at the CLI.
enum class ErrorCode : int {
  kDomain = 3,
  kParse = 4,
  kSchemaMismatch = 5,
  kTooFewRows = 6,
  kSingularCovariance = 7,
  kDegenerateCorrection = 8,
  kIo = 9,
  kConfig = 10,
};

std::string_view error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error(ErrorCode::kDomain, what) {}
};

/// Raised by cholesky(); lrtcore reports it as SingularCovariance.
class NotPositiveDefinite : public Error {
 public:
  explicit NotPositiveDefinite(const std::string& what)
      : Error(ErrorCode::kSingularCovariance, what) {}
};

class DegenerateCorrection : public Error {
 public:
  explicit DegenerateCorrection(const std::string& what)
      : Error(ErrorCode::kDegenerateCorrection, what) {}
};

class ParseError : public Error {
 public:
  explicit ParseError(const std::string& what) : Error(ErrorCode::kParse, what) {}
};

class SchemaMismatch : public Error {
 public:
  explicit SchemaMismatch(const std::string& what)
      : Error(ErrorCode::kSchemaMismatch, what) {}
};

class TooFewRows : public Error {
 public:
  explicit TooFewRows(const std::string& what) : Error(ErrorCode::kTooFewRows, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorCode::kIo, what) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(ErrorCode::kConfig, what) {}
};

}  // namespace ggmlrt
