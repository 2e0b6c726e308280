#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fkrc {

enum class ErrorCode {
  InvalidArgument,
  TooManyBonds,
  NonIntegerQ,
  DegenerateNorm,
  ZeroVector,
  InsufficientResolution,
  CoveringViolation,
  TargetNotCovered,
  PartitionViolation,
  UnsupportedModel,
  DegenerateP,
  InconsistentBC,
  NoSpanningComponent,
  MultipleCrossings,
  TooLarge,
  InsufficientDecades,
  IllConditioned,
  TooFewSteps,
  AcceptanceTooLow,
  GridMismatch,
  NonConvex,
  InvalidConfig,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::TooManyBonds: return "TooManyBonds";
    case ErrorCode::NonIntegerQ: return "NonIntegerQ";
    case ErrorCode::DegenerateNorm: return "DegenerateNorm";
    case ErrorCode::ZeroVector: return "ZeroVector";
    case ErrorCode::InsufficientResolution: return "InsufficientResolution";
    case ErrorCode::CoveringViolation: return "CoveringViolation";
    case ErrorCode::TargetNotCovered: return "TargetNotCovered";
    case ErrorCode::PartitionViolation: return "PartitionViolation";
    case ErrorCode::UnsupportedModel: return "UnsupportedModel";
    case ErrorCode::DegenerateP: return "DegenerateP";
    case ErrorCode::InconsistentBC: return "InconsistentBC";
    case ErrorCode::NoSpanningComponent: return "NoSpanningComponent";
    case ErrorCode::MultipleCrossings: return "MultipleCrossings";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::InsufficientDecades: return "InsufficientDecades";
    case ErrorCode::IllConditioned: return "IllConditioned";
    case ErrorCode::TooFewSteps: return "TooFewSteps";
    case ErrorCode::AcceptanceTooLow: return "AcceptanceTooLow";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::NonConvex: return "NonConvex";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
  }
  return "Unknown";
}

/// Every failure raised by the library carries a machine-readable code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline void require(bool condition, ErrorCode code, const std::string& what) {
  if (!condition) throw Error(code, what);
}

}  // namespace fkrc
