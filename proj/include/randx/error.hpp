#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace randx {

enum class ErrorCode {
  NonHermitian,
  NonFinite,
  NegativeEigenvalue,
  NotAResolution,
  NotProjector,
  NotNormalized,
  DimMismatch,
  UnknownLetter,
  LengthMismatch,
  BadQ,
  BadParams,
  BadDims,
  BadDelta,
  BadTable,
  Incompatible,
  DomainError,
  NotPredictable,
  TooLarge,
  Unsupported,
  Unknown,
  Parse,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonHermitian: return "NonHermitian";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::NegativeEigenvalue: return "NegativeEigenvalue";
    case ErrorCode::NotAResolution: return "NotAResolution";
    case ErrorCode::NotProjector: return "NotProjector";
    case ErrorCode::NotNormalized: return "NotNormalized";
    case ErrorCode::DimMismatch: return "DimMismatch";
    case ErrorCode::UnknownLetter: return "UnknownLetter";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::BadQ: return "BadQ";
    case ErrorCode::BadParams: return "BadParams";
    case ErrorCode::BadDims: return "BadDims";
    case ErrorCode::BadDelta: return "BadDelta";
    case ErrorCode::BadTable: return "BadTable";
    case ErrorCode::Incompatible: return "Incompatible";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::NotPredictable: return "NotPredictable";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::Unsupported: return "Unsupported";
    case ErrorCode::Unknown: return "Unknown";
    case ErrorCode::Parse: return "Parse";
  }
  return "Error";
}

// Computational guards, as opposed to malformed input.
inline bool is_guard(ErrorCode code) {
  return code == ErrorCode::TooLarge || code == ErrorCode::Unsupported;
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace randx
