#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mteq {

enum class ErrorCode {
  DimensionMismatch,
  InvalidArgument,
  NonFiniteValue,
  NegativePowerRHS,
  SingularMatrix,
  ZeroDiagonal,
  NotZTensor,
  NotStructured,
  NoNonnegativeSolution,
  NegativeEntry,
  ZeroSystem,
  ParseError,
  IoError,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NonFiniteValue: return "NonFiniteValue";
    case ErrorCode::NegativePowerRHS: return "NegativePowerRHS";
    case ErrorCode::SingularMatrix: return "SingularMatrix";
    case ErrorCode::ZeroDiagonal: return "ZeroDiagonal";
    case ErrorCode::NotZTensor: return "NotZTensor";
    case ErrorCode::NotStructured: return "NotStructured";
    case ErrorCode::NoNonnegativeSolution: return "NoNonnegativeSolution";
    case ErrorCode::NegativeEntry: return "NegativeEntry";
    case ErrorCode::ZeroSystem: return "ZeroSystem";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

/// Exception carrying a machine-readable code; every failure in the library
/// surfaces as one of these.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace mteq
