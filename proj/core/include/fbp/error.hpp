#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fbp {

enum class ErrorCode {
  EvenNodeCount,
  InvalidGrid,
  OutOfDomain,
  NegativeArgument,
  NonpositiveEps,
  InvalidPenalty,
  InvalidObstacle,
  GridTooShallow,
  InvalidParams,
  MaxItersExceeded,
  NodeNewtonDiverged,
  NotConverged,
  EmptyOmega,
  EmptyBand,
  InsufficientSamples,
  QuadratureFailure,
  NoFeasibleActiveSet,
  EmptyBoundary,
  GridMismatch,
  ConfigInvalid,
  Io,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Exception carrying a machine-checkable error code. All library errors are
/// reported through this type.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::EvenNodeCount: return "EvenNodeCount";
    case ErrorCode::InvalidGrid: return "InvalidGrid";
    case ErrorCode::OutOfDomain: return "OutOfDomain";
    case ErrorCode::NegativeArgument: return "NegativeArgument";
    case ErrorCode::NonpositiveEps: return "NonpositiveEps";
    case ErrorCode::InvalidPenalty: return "InvalidPenalty";
    case ErrorCode::InvalidObstacle: return "InvalidObstacle";
    case ErrorCode::GridTooShallow: return "GridTooShallow";
    case ErrorCode::InvalidParams: return "InvalidParams";
    case ErrorCode::MaxItersExceeded: return "MaxItersExceeded";
    case ErrorCode::NodeNewtonDiverged: return "NodeNewtonDiverged";
    case ErrorCode::NotConverged: return "NotConverged";
    case ErrorCode::EmptyOmega: return "EmptyOmega";
    case ErrorCode::EmptyBand: return "EmptyBand";
    case ErrorCode::InsufficientSamples: return "InsufficientSamples";
    case ErrorCode::QuadratureFailure: return "QuadratureFailure";
    case ErrorCode::NoFeasibleActiveSet: return "NoFeasibleActiveSet";
    case ErrorCode::EmptyBoundary: return "EmptyBoundary";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace fbp
