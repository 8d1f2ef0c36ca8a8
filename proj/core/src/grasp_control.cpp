#include "tacsim/grasp_control.hpp"

#include <algorithm>
#include <cmath>

#include "tacsim/errors.hpp"

namespace tacsim::grasp {

std::string_view to_string(Phase phase) noexcept {
  switch (phase) {
    case Phase::Idle: return "Idle";
    case Phase::Closing: return "Closing";
    case Phase::Holding: return "Holding";
    case Phase::Releasing: return "Releasing";
    case Phase::Done: return "Done";
  }
  return "?";
}

std::string_view to_string(EventKind kind) noexcept {
  switch (kind) {
    case EventKind::ClosingStart: return "closing_start";
    case EventKind::Halt: return "halt";
    case EventKind::MechanicalLimit: return "mechanical_limit";
    case EventKind::HoldStart: return "hold_start";
    case EventKind::ReleaseStart: return "release_start";
    case EventKind::Done: return "done";
  }
  return "?";
}

void GraspPolicy::validate() const {
  if (!(a >= 0.0 && a <= 1.0)) throw InvalidArgument("policy a must lie in [0, 1]");
  if (const auto* s = std::get_if<SingleThreshold>(&mode)) {
    if (!(s->t_g > 0.0)) throw InvalidArgument("T_g must be > 0");
  } else {
    const auto& h = std::get<Hysteresis>(mode);
    if (!(h.t_low > 0.0) || !(h.t_low < h.t_high)) throw InvalidArgument("need 0 < T_low < T_high");
    if (!(h.hold_s >= 0.0)) throw InvalidArgument("hold time must be >= 0");
  }
}

double leveraged_signal(const pipeline::RelativeFrame& frame, double a) {
  const Vec3& b = frame.sa2_ut;
  const double z = a * b.z() + (1.0 - a) * frame.fa1_sum();
  return std::sqrt(b.x() * b.x() + b.y() * b.y() + z * z);
}

GripperState initial_state(int fingers) {
  if (fingers < 1) throw InvalidArgument("gripper needs at least one finger");
  GripperState s;
  s.fingers.resize(static_cast<std::size_t>(fingers));
  return s;
}

namespace {

bool all_settled(const GripperState& s) {
  return std::all_of(s.fingers.begin(), s.fingers.end(), [](const FingerState& f) { return f.settle_ticks == 0; });
}

/// Closing for one finger against threshold t. Returns true if the finger is
/// settled and above the threshold after this tick.
bool close_finger(FingerState& f, Command& cmd, double g, double t, bool latch, int index,
                  const ControllerLimits& limits, std::vector<ControllerEvent>& events) {
  if (f.status == FingerStatus::AtLimit) return false;
  if (latch && f.status == FingerStatus::Halted) return true;
  if (f.settle_ticks > 0) {
    --f.settle_ticks;
    return false;
  }
  if (g > t) {
    if (f.status != FingerStatus::Halted) events.push_back({EventKind::Halt, index});
    f.status = FingerStatus::Halted;
    return true;
  }
  if (f.increments >= limits.max_increments) {
    f.status = FingerStatus::AtLimit;
    events.push_back({EventKind::MechanicalLimit, index});
    return false;
  }
  f.status = FingerStatus::Moving;
  ++f.increments;
  f.settle_ticks = limits.settle_ticks;
  cmd = Command::Close;
  return false;
}

}  // namespace

StepResult controller_step(const GripperState& state, const GraspPolicy& policy, std::span<const double> g,
                           const ControllerLimits& limits) {
  if (g.size() != state.fingers.size()) throw InvalidArgument("one leveraged signal per finger required");
  StepResult out{state, std::vector<Command>(state.fingers.size(), Command::Stay), {}};
  GripperState& s = out.state;
  auto& events = out.events;
  const auto n = s.fingers.size();

  if (s.phase == Phase::Idle) {
    s.phase = Phase::Closing;
    events.push_back({EventKind::ClosingStart, -1});
  }

  switch (s.phase) {
    case Phase::Idle:
    case Phase::Done:
      break;

    case Phase::Closing: {
      const bool single = std::holds_alternative<SingleThreshold>(policy.mode);
      const double t = single ? std::get<SingleThreshold>(policy.mode).t_g : std::get<Hysteresis>(policy.mode).t_high;
      std::size_t above = 0;
      for (std::size_t i = 0; i < n; ++i)
        if (close_finger(s.fingers[i], out.commands[i], g[i], t, single, static_cast<int>(i), limits, events))
          ++above;
      const auto at_limit = static_cast<std::size_t>(std::count_if(
          s.fingers.begin(), s.fingers.end(), [](const FingerState& f) { return f.status == FingerStatus::AtLimit; }));
      if (above == n) {
        s.phase = Phase::Holding;
        s.hold_ticks = 0;
        events.push_back({EventKind::HoldStart, -1});
      } else if (at_limit > 0 && above + at_limit == n) {
        s.phase = Phase::Done;
        events.push_back({EventKind::Done, -1});
      }
      break;
    }

    case Phase::Holding: {
      const auto* h = std::get_if<Hysteresis>(&policy.mode);
      if (h == nullptr) break;
      ++s.hold_ticks;
      if (s.hold_ticks >= static_cast<int>(std::lround(h->hold_s * limits.rate_hz))) {
        s.phase = Phase::Releasing;
        for (auto& f : s.fingers) f.settle_ticks = 0;
        events.push_back({EventKind::ReleaseStart, -1});
      }
      break;
    }

    case Phase::Releasing: {
      const double t_low = std::get<Hysteresis>(policy.mode).t_low;
      if (!all_settled(s)) {
        for (auto& f : s.fingers) f.settle_ticks = std::max(0, f.settle_ticks - 1);
        break;
      }
      const bool any_above = std::any_of(g.begin(), g.end(), [t_low](double v) { return v > t_low; });
      const bool any_closed = std::any_of(s.fingers.begin(), s.fingers.end(),
                                          [](const FingerState& f) { return f.increments > 0; });
      if (!any_above || !any_closed) {
        s.phase = Phase::Done;
        events.push_back({EventKind::Done, -1});
        break;
      }
      for (std::size_t i = 0; i < n; ++i) {
        FingerState& f = s.fingers[i];
        if (f.increments == 0) continue;
        --f.increments;
        f.status = FingerStatus::Moving;
        f.settle_ticks = limits.settle_ticks;
        out.commands[i] = Command::Open;
      }
      break;
    }
  }
  return out;
}

}  // namespace tacsim::grasp
