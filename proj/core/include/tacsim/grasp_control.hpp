#pragma once

// Force-closed grasp controller. controller_step is a pure transition
// (state, leveraged signals) -> (state, motor commands, events); the
// gripper simulation drives it once per frame.

#include <cstdint>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "tacsim/frame.hpp"

namespace tacsim::grasp {

enum class Phase { Idle, Closing, Holding, Releasing, Done };
std::string_view to_string(Phase phase) noexcept;

struct SingleThreshold {
  double t_g = 700.0;
};

struct Hysteresis {
  double t_high = 900.0;
  double t_low = 500.0;
  double hold_s = 2.0;
};

struct GraspPolicy {
  std::variant<SingleThreshold, Hysteresis> mode = SingleThreshold{};
  double a = 0.3;

  void validate() const;
};

inline constexpr double kMotorIncrementDeg = 1.5;

/// sqrt(ΔBx^2 + ΔBy^2 + (a ΔBz + (1 - a) ΣR)^2), raw mixed units.
double leveraged_signal(const pipeline::RelativeFrame& frame, double a);

enum class FingerStatus { Moving, Halted, AtLimit };

struct FingerState {
  int increments = 0;    // motor angle = increments * 1.5 deg, 0 = fully open
  int settle_ticks = 0;  // ticks left before g is trusted again after a move
  FingerStatus status = FingerStatus::Moving;

  double motor_deg() const { return increments * kMotorIncrementDeg; }
};

struct GripperState {
  Phase phase = Phase::Idle;
  std::vector<FingerState> fingers;
  int hold_ticks = 0;
};

GripperState initial_state(int fingers);

struct ControllerLimits {
  int max_increments = 360;  // mechanical limit of the rack
  int settle_ticks = 6;      // filter window; g is stale for this many ticks after a step
  int rate_hz = 250;
};

enum class Command : std::int8_t { Open = -1, Stay = 0, Close = 1 };

enum class EventKind { ClosingStart, Halt, MechanicalLimit, HoldStart, ReleaseStart, Done };
std::string_view to_string(EventKind kind) noexcept;

struct ControllerEvent {
  EventKind kind;
  int finger = -1;  // -1: whole gripper
};

struct StepResult {
  GripperState state;
  std::vector<Command> commands;
  std::vector<ControllerEvent> events;
};

/// One control tick. `g` holds the current filtered leveraged signal per finger.
/// The returned state already has the commanded increments applied.
StepResult controller_step(const GripperState& state, const GraspPolicy& policy, std::span<const double> g,
                           const ControllerLimits& limits = {});

}  // namespace tacsim::grasp
