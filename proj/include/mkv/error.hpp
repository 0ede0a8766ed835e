#pragma once

#include <stdexcept>
#include <string>

namespace mkv {

enum class ErrorCode {
  NonDivisibleStep,
  NonPositive,
  OutOfRange,
  GridMismatch,
  DimensionMismatch,
  SizeMismatch,
  SupportTooLarge,
  BoundViolation,
  DelayOutOfRange,
  EmptySlice,
  NotConverged,
  SchemaError,
  BoundsError,
  IoError,
  Internal,
};

const char* to_string(ErrorCode code);

/// Base exception for every failure raised by the library. The code lets callers
/// dispatch without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code), detail_(what) {}

  ErrorCode code() const noexcept { return code_; }
  /// The message without the code prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonDivisibleStep: return "NonDivisibleStep";
    case ErrorCode::NonPositive: return "NonPositive";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::SizeMismatch: return "SizeMismatch";
    case ErrorCode::SupportTooLarge: return "SupportTooLarge";
    case ErrorCode::BoundViolation: return "BoundViolation";
    case ErrorCode::DelayOutOfRange: return "DelayOutOfRange";
    case ErrorCode::EmptySlice: return "EmptySlice";
    case ErrorCode::NotConverged: return "NotConverged";
    case ErrorCode::SchemaError: return "SchemaError";
    case ErrorCode::BoundsError: return "BoundsError";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::Internal: return "Internal";
  }
  return "Unknown";
}

}  // namespace mkv
