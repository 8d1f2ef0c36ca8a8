#pragma once

// Two-finger rack-and-pinion gripper with a simulated sensor on each pad.
// Contact is quasi-static: object, tweezers spring and sensor pads act as
// springs in series and the grip force follows from the commanded closure.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tacsim/grasp_control.hpp"
#include "tacsim/sensor_unit.hpp"
#include "tacsim/signal_pipeline.hpp"

namespace tacsim::grasp {

struct GripperGeometry {
  double pinion_radius_mm = 3.0;
  double opening_mm = 60.0;  // pad-to-pad distance at motor angle 0
  int max_increments = 360;

  double travel_per_increment_mm() const;
  double opening_at(int increments_a, int increments_b) const;
};

enum class ObjectKind { None, Egg, Tweezers, Rigid };

struct ObjectModel {
  ObjectKind kind = ObjectKind::None;
  double size_mm = 0.0;             // egg / rigid width, or the object held by the tweezers
  double stiffness_n_per_mm = 0.0;  // object contact stiffness
  double crush_force_n = 0.0;       // 0: unbreakable
  // Tweezers only.
  double arm_width_mm = 14.0;
  double tip_opening_mm = 12.0;
  double spring_n_per_mm = 0.012;

  static ObjectModel none();
  static ObjectModel egg(double size_mm = 45.0, double stiffness_n_per_mm = 5.0, double crush_force_n = 25.0);
  static ObjectModel tweezers(double object_size_mm, double object_stiffness_n_per_mm = 3.0);
  static ObjectModel rigid(double size_mm, double stiffness_n_per_mm = 200.0);

  void validate() const;
  /// Pad distance at which the fingers first touch.
  double contact_width_mm() const;
  /// Closure of the object (and tweezers) beyond first touch under grip force F.
  double compression_mm(double force_n) const;
};

/// Grip force for a given pad opening; sensor compliance `pad_mm_per_n` on each pad.
double contact_force_n(const ObjectModel& object, double opening_mm, double pad_mm_per_n);

struct GraspScenario {
  ObjectModel object = ObjectModel::egg();
  GraspPolicy policy{};
  GripperGeometry geometry{};
  sensor::UnitConfig unit = sensor::default_unit_config();
  pipeline::StreamConfig stream{};
  double max_s = 30.0;
  double post_hold_s = 1.0;  // SingleThreshold runs stop this long after HoldStart
};

struct TraceRow {
  std::int64_t tick = 0;
  Phase phase = Phase::Idle;
  int finger = 0;
  double motor_deg = 0.0;
  double g = 0.0;
  double contact_force_n = 0.0;
  std::string event;
};

struct GraspResult {
  std::vector<TraceRow> trace;
  Phase final_phase = Phase::Idle;
  std::vector<double> final_g;
  std::vector<double> final_motor_deg;
  /// Filtered g of each finger on the tick Holding was entered.
  std::vector<double> hold_g;
  /// Noise-free change of g, at hold start (or the end of the run without a
  /// hold), caused by each finger's last closing increment and anything that
  /// moved after it.
  std::vector<double> signal_quantum;
  double final_force_n = 0.0;
  double max_force_n = 0.0;
  std::int64_t hold_start_tick = -1;
  std::int64_t release_start_tick = -1;
  std::int64_t done_tick = -1;
  double hold_opening_mm = 0.0;
  bool mechanical_limit = false;
};

/// Throws CrushDetected if the contact force exceeds the object's crush force.
GraspResult run_grasp(const GraspScenario& scenario);

/// Noise-free leveraged signal for a normal grip force at the pad centre.
double noise_free_signal(const sensor::UnitConfig& unit, double force_n, double a);

std::string event_log_header();
std::string to_csv_row(const TraceRow& row);

struct LinearityReport {
  std::vector<double> sizes_mm;
  std::vector<double> gaps_mm;
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

/// Hysteresis grasp of the tweezers per object size; fits hold opening vs size.
/// Throws GraspFailed if a run never reaches Holding, RankDeficientFit for a
/// degenerate size set.
LinearityReport tweezers_linearity_study(const GraspScenario& base, std::span<const double> sizes_mm);

}  // namespace tacsim::grasp
