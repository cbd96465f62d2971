#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace crdist {

enum class ErrorCode {
  NonHermitianInput,
  NegativeEigenvalue,
  DimensionMismatch,
  InvalidState,
  SizeMismatch,
  InvalidPovm,
  UnknownName,
  BadParam,
  DomainError,
  BadPartition,
  NotPure,
  NotPureEnsemble,
  EnvelopeExceeded,
  LengthMismatch,
  ParseError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the named error kinds,
/// so callers (the CLI in particular) can map them onto exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NonHermitianInput: return "NonHermitianInput";
    case ErrorCode::NegativeEigenvalue: return "NegativeEigenvalue";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::InvalidState: return "InvalidState";
    case ErrorCode::SizeMismatch: return "SizeMismatch";
    case ErrorCode::InvalidPovm: return "InvalidPovm";
    case ErrorCode::UnknownName: return "UnknownName";
    case ErrorCode::BadParam: return "BadParam";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::BadPartition: return "BadPartition";
    case ErrorCode::NotPure: return "NotPure";
    case ErrorCode::NotPureEnsemble: return "NotPureEnsemble";
    case ErrorCode::EnvelopeExceeded: return "EnvelopeExceeded";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

}  // namespace crdist
