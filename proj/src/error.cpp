#include "ggmlrt/error.hpp"

namespace ggmlrt {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kDomain: return "DomainError";
    case ErrorCode::kParse: return "ParseError";
    case ErrorCode::kSchemaMismatch: return "SchemaMismatch";
    case ErrorCode::kTooFewRows: return "TooFewRows";
    case ErrorCode::kSingularCovariance: return "SingularCovariance";
    case ErrorCode::kDegenerateCorrection: return "DegenerateCorrection";
    case ErrorCode::kIo: return "IoError";
    case ErrorCode::kConfig: return "ConfigError";
  }
  return "Error";
}

}  // namespace ggmlrt
