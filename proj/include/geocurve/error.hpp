#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace geocurve {

enum class ErrorKind {
  DegenerateVector,
  DimensionMismatch,
  DegenerateCurve,
  OutOfRange,
  LengthMismatch,
  EmptyInput,
  InvalidArgument,
  InitFailure,
  NonFiniteLoss,
  MissingCurve,
  TooFewSamples,
  EmptyTrainSet,
  LabelMismatch,
  ParseError,
  FitFailure,
};

constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::DegenerateVector: return "DegenerateVector";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::DegenerateCurve: return "DegenerateCurve";
    case ErrorKind::OutOfRange: return "OutOfRange";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::EmptyInput: return "EmptyInput";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::InitFailure: return "InitFailure";
    case ErrorKind::NonFiniteLoss: return "NonFiniteLoss";
    case ErrorKind::MissingCurve: return "MissingCurve";
    case ErrorKind::TooFewSamples: return "TooFewSamples";
    case ErrorKind::EmptyTrainSet: return "EmptyTrainSet";
    case ErrorKind::LabelMismatch: return "LabelMismatch";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::FitFailure: return "FitFailure";
  }
  return "Unknown";
}

/// Every failure raised by the library carries a machine-checkable kind.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace geocurve
