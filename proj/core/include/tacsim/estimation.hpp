#pragma once

// Contact location, tri-axis force and joint torque from a relative frame,
// plus the least-squares calibration that maps signals to newtons.

#include <string>
#include <vector>

#include "tacsim/frame.hpp"

namespace tacsim::estimation {

enum class LocationMode {
  Normalized,  // weighted centroid, divides by the pressure sum
  Literal,     // divides by the taxel count, scales with force
};

/// A taxel must exceed this many counts above baseline to count as contact.
inline constexpr double kActivationThresholdCounts = 5.0;

/// Throws NoContact when no taxel exceeds the activation threshold.
Vec2 estimate_location(const TaxelValues& fa1, double pitch_mm = kTaxelPitchMm,
                       LocationMode mode = LocationMode::Normalized);

/// Multipliers applied to ΔBz and ΣR before mixing. 1/1 is the raw mix.
struct ZChannelScale {
  double hall = 1.0;
  double fa1_sum = 1.0;
};

struct FitDiagnostics {
  Vec3 r_squared = Vec3::Zero();
  Vec3 rmsd_n = Vec3::Zero();
  std::vector<double> a_grid;
  std::vector<double> a_rmsd_n;
  int sample_count = 0;
};

struct CalibrationParams {
  Vec3 k = Vec3::Zero();
  Vec3 b = Vec3::Zero();
  double a = 0.0;
  double pitch_mm = kTaxelPitchMm;
  ZChannelScale z_scale{};
  FitDiagnostics diagnostics{};

  void validate() const;
};

/// a * s_h * ΔBz + (1 - a) * s_r * ΣR
double mixed_z_channel(const pipeline::RelativeFrame& frame, double a, const ZChannelScale& scale = {});

Vec3 estimate_force(const pipeline::RelativeFrame& frame, const CalibrationParams& params);

inline const Vec3 kDefaultJointCenterMm{6.25, 6.25, -10.0};

/// r x F with r = (x, y, 0) - joint centre; N*mm.
Vec3 estimate_torque(const Vec2& location_mm, const Vec3& force_n,
                     const Vec3& joint_center_mm = kDefaultJointCenterMm);

struct ContactEstimate {
  Vec2 location_mm = Vec2::Zero();
  Vec3 force_n = Vec3::Zero();
  Vec3 torque_nmm = Vec3::Zero();
  Vec3 arm_mm = Vec3::Zero();
};

ContactEstimate estimate_contact(const pipeline::RelativeFrame& frame, const CalibrationParams& params,
                                 const Vec3& joint_center_mm = kDefaultJointCenterMm,
                                 LocationMode mode = LocationMode::Normalized);

// ---------------------------------------------------------------------------
// Calibration

struct SweepSample {
  pipeline::RelativeFrame frame;
  Vec3 force_n = Vec3::Zero();        // F-T ground truth
  Vec2 location_mm = Vec2::Zero();    // F-T centre of pressure
};

struct CharacterizationSweep {
  std::string location_label;
  Vec2 target_mm = Vec2::Zero();
  std::vector<SweepSample> samples;
  bool ground_truth_noise_free = true;
};

/// 0, 0.25, ..., 2 N.
std::vector<double> force_grid(double max_n = 2.0, double step_n = 0.25);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  double rmsd = 0.0;
};

/// Ordinary least squares y = slope * x + intercept.
/// Throws RankDeficientFit when x is constant or fewer than two points are given.
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

enum class ZScaling {
  Standardize,  // divide each z channel by its standard deviation over the sweep
  None,
};

/// Per-axis OLS at a fixed redundancy weight `a`.
/// Throws RankDeficientFit when an axis has fewer than two distinct force levels.
CalibrationParams fit_calibration(const std::vector<CharacterizationSweep>& sweeps, double a,
                                  ZScaling scaling = ZScaling::Standardize,
                                  double pitch_mm = kTaxelPitchMm);

struct ASelection {
  double a = 0.0;
  std::vector<double> grid;
  std::vector<double> rmsd_n;
};

/// Scans a over [0, 1] in `step` increments and returns the argmin of the
/// z-axis fit RMSD. Ties go to the smallest a.
ASelection select_a(const std::vector<CharacterizationSweep>& sweeps, double step = 0.05,
                    ZScaling scaling = ZScaling::Standardize);

/// select_a followed by fit_calibration at the chosen a, with the scan stored
/// in the diagnostics.
CalibrationParams calibrate(const std::vector<CharacterizationSweep>& sweeps,
                            ZScaling scaling = ZScaling::Standardize, double pitch_mm = kTaxelPitchMm);

}  // namespace tacsim::estimation
