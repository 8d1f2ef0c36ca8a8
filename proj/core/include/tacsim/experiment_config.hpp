#pragma once

// Typed experiment configuration built from the flat key-value schema.
// Every key has a default; files and --set overrides may only name known keys.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "tacsim/estimation.hpp"
#include "tacsim/gripper_sim.hpp"
#include "tacsim/kv_config.hpp"
#include "tacsim/sensor_unit.hpp"
#include "tacsim/signal_pipeline.hpp"

namespace tacsim::config {

struct CharacterizeSettings {
  double max_force_n = 2.0;
  double step_n = 0.25;
  int hold_samples = 25;
  double shear_ratio = 0.2;
  double joint_z_mm = -10.0;
  estimation::LocationMode location_mode = estimation::LocationMode::Normalized;
  estimation::ZScaling z_scaling = estimation::ZScaling::Standardize;
  double a_step = 0.05;
  bool write_frames = true;
};

struct DisturbanceSettings {
  double earth_field_ut = 50.0;
  double earth_perp_ut = 32.4604;  // component perpendicular to the test axis
  double rotation_deg = 60.0;
  double imu_noise_deg = 0.2;
  int cycles = 5;
  int settle_samples = 25;
  int plateau_samples = 250;
};

struct SnrSettings {
  double dy_min_mm = 4.0;
  double dy_max_mm = 30.0;
  double dy_step_mm = 1.0;
};

struct GraspSettings {
  grasp::ObjectKind object = grasp::ObjectKind::Egg;
  std::string policy = "auto";  // auto | single | hysteresis
  double t_g = 700.0;
  double t_high = 900.0;
  double t_low = 500.0;
  double hold_s = 2.0;
  double a = 0.3;
  double opening_mm = -1.0;  // < 0: 60 mm, or 20 mm for tweezers
  double pinion_radius_mm = 3.0;
  int max_increments = 360;
  double max_s = 30.0;
  double post_hold_s = 1.0;
  double egg_size_mm = 45.0;
  double egg_stiffness_n_per_mm = 5.0;
  double egg_crush_n = 25.0;
  double rigid_size_mm = 30.0;
  double tweezers_object_mm = 6.0;
  double tweezers_arm_mm = 14.0;
  double tweezers_tip_mm = 12.0;
  double tweezers_spring_n_per_mm = 0.012;
  double object_stiffness_n_per_mm = 3.0;
  std::vector<double> sizes_mm{2, 4, 6, 8, 10};
};

struct StreamSettings {
  double duration_s = 4.0;
  double press_force_n = 1.0;
  bool binary = false;
};

struct ExperimentConfig {
  KeyValues values;  // fully resolved: defaults, then file, then overrides
  std::uint64_t seed = 1;

  sensor::UnitConfig unit;
  pipeline::StreamConfig stream;
  CharacterizeSettings characterize;
  DisturbanceSettings disturbance;
  SnrSettings snr;
  GraspSettings grasp;
  StreamSettings stream_run;

  std::uint64_t hash() const;
  /// "tacsim <experiment> config_hash=<hex> seed=<n>"
  std::string header(const std::string& experiment) const;
};

/// Every known key with its default value.
const KeyValues& default_values();

/// Resolves defaults + optional file + overrides. Throws ConfigError for unknown
/// keys and unparsable or invalid values.
ExperimentConfig load_config(const std::filesystem::path& file, const std::vector<std::string>& overrides,
                             std::optional<std::uint64_t> seed);
ExperimentConfig make_config(const KeyValues& values, std::optional<std::uint64_t> seed = std::nullopt);

/// Scenario for the configured grasp object and policy.
grasp::GraspScenario grasp_scenario(const ExperimentConfig& cfg);

}  // namespace tacsim::config
