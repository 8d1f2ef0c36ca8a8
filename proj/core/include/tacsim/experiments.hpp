#pragma once

// Experiment drivers behind the CLI subcommands. Each returns its report and,
// when `out_dir` is non-empty, writes CSV / key-value artifacts there. Every
// artifact starts with a '#' line carrying the config hash and seed.

#include <array>
#include <filesystem>
#include <string>
#include <vector>

#include "tacsim/disturbance.hpp"
#include "tacsim/estimation.hpp"
#include "tacsim/experiment_config.hpp"
#include "tacsim/gripper_sim.hpp"

namespace tacsim::experiments {

struct PressLocation {
  std::string label;
  Vec2 target_mm;
  Vec2 shear_dir;
};

/// L1..L5 press targets and their shear directions.
const std::array<PressLocation, 5>& press_locations();

/// Simulated characterization of L1..L5 over the force grid; one sample per
/// force level, taken at the end of its hold. `frame_dir` receives the raw
/// frame logs when non-empty.
std::vector<estimation::CharacterizationSweep> simulate_sweeps(const config::ExperimentConfig& cfg,
                                                               std::uint64_t seed,
                                                               const std::filesystem::path& frame_dir = {},
                                                               const std::string& experiment = "characterize");

struct LocationReport {
  std::string label;
  double location_rmse_mm = 0.0;
  double force_rmse_n = 0.0;
  double torque_rmse_nmm = 0.0;
  int contact_samples = 0;
  int samples = 0;
};

struct CharacterizeReport {
  estimation::CalibrationParams params;
  std::vector<LocationReport> locations;
  double torque_rmse_nmm = 0.0;  // pooled over all contact samples
};

/// Fits on a sweep with the run seed, evaluates on an independent repeat.
CharacterizeReport run_characterize(const config::ExperimentConfig& cfg, const std::filesystem::path& out_dir);

/// Location/force/torque errors of `params` on `sweeps`.
CharacterizeReport evaluate(const std::vector<estimation::CharacterizationSweep>& sweeps,
                            const estimation::CalibrationParams& params, const config::ExperimentConfig& cfg);

estimation::CalibrationParams run_calibrate(const config::ExperimentConfig& cfg, const std::filesystem::path& out_dir);

struct DisturbanceReport {
  Vec3 true_field_ut = Vec3::Zero();  // body frame at the reference orientation
  disturbance::EarthFieldEstimate estimate;
  double s_ut = 0.0;
  double d_before_ut = 0.0;
  double d_after_ut = 0.0;
  double snr_before = 1.0;
  double snr_after = 1.0;
  double reduction = 0.0;            // 1 - snr_before
  double recovery_amplitude = 0.0;   // (snr_after - snr_before) / (1 - snr_before)
  double recovery_power = 0.0;       // 1 - (d_after / d_before)^2
};

DisturbanceReport run_disturbance(const config::ExperimentConfig& cfg, const std::filesystem::path& out_dir);

disturbance::SnrSweep run_snr_sweep(const config::ExperimentConfig& cfg, const std::filesystem::path& out_dir);

struct GraspReport {
  grasp::GraspResult result;
  bool has_linearity = false;
  grasp::LinearityReport linearity;
};

/// Runs the configured grasp; for tweezers also the size linearity study.
GraspReport run_grasp(const config::ExperimentConfig& cfg, const std::filesystem::path& out_dir);

struct StreamReport {
  std::vector<pipeline::TactileFrame> frames;   // all fingers, interleaved per timestamp
  std::vector<pipeline::RelativeFrame> processed;
  int timestamps = 0;
};

StreamReport run_stream(const config::ExperimentConfig& cfg, const std::filesystem::path& out_dir);

}  // namespace tacsim::experiments
