#include "tacsim/errors.hpp"

namespace tacsim {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::OffsetTooSmall: return "OffsetTooSmall";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::DisplacementOutOfRange: return "DisplacementOutOfRange";
    case ErrorCode::InsufficientSamples: return "InsufficientSamples";
    case ErrorCode::MalformedRecord: return "MalformedRecord";
    case ErrorCode::NoContact: return "NoContact";
    case ErrorCode::RankDeficientFit: return "RankDeficientFit";
    case ErrorCode::DegenerateRotation: return "DegenerateRotation";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::InvalidSignal: return "InvalidSignal";
    case ErrorCode::CrushDetected: return "CrushDetected";
    case ErrorCode::GraspFailed: return "GraspFailed";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

RankDeficient::RankDeficient(const std::string& message, int rank, const Eigen::Vector3d& axis)
    : Error(ErrorCode::RankDeficient, message), rank_(rank), axis_(axis) {}

}  // namespace tacsim
