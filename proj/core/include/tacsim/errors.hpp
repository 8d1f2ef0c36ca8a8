#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include <Eigen/Core>

namespace tacsim {

enum class ErrorCode {
  InvalidArgument,
  OffsetTooSmall,
  NoConvergence,
  DisplacementOutOfRange,
  InsufficientSamples,
  MalformedRecord,
  NoContact,
  RankDeficientFit,
  DegenerateRotation,
  RankDeficient,
  InvalidSignal,
  CrushDetected,
  GraspFailed,
  ConfigError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Base of every error raised by the library. Callers that only care about
/// the category can switch on code(); tests usually catch the concrete type.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

template <ErrorCode Code>
class CodedError : public Error {
 public:
  explicit CodedError(const std::string& message) : Error(Code, message) {}
};

using InvalidArgument = CodedError<ErrorCode::InvalidArgument>;
using OffsetTooSmall = CodedError<ErrorCode::OffsetTooSmall>;
using NoConvergence = CodedError<ErrorCode::NoConvergence>;
using DisplacementOutOfRange = CodedError<ErrorCode::DisplacementOutOfRange>;
using InsufficientSamples = CodedError<ErrorCode::InsufficientSamples>;
using MalformedRecord = CodedError<ErrorCode::MalformedRecord>;
using NoContact = CodedError<ErrorCode::NoContact>;
using RankDeficientFit = CodedError<ErrorCode::RankDeficientFit>;
using DegenerateRotation = CodedError<ErrorCode::DegenerateRotation>;
using InvalidSignal = CodedError<ErrorCode::InvalidSignal>;
using CrushDetected = CodedError<ErrorCode::CrushDetected>;
using GraspFailed = CodedError<ErrorCode::GraspFailed>;
using ConfigError = CodedError<ErrorCode::ConfigError>;

/// Stacked rotation system does not constrain the earth field in every
/// direction. unobservable_axis() is the unit null-space direction.
class RankDeficient : public Error {
 public:
  RankDeficient(const std::string& message, int rank, const Eigen::Vector3d& axis);
  int rank() const noexcept { return rank_; }
  const Eigen::Vector3d& unobservable_axis() const noexcept { return axis_; }

 private:
  int rank_;
  Eigen::Vector3d axis_;
};

}  // namespace tacsim
