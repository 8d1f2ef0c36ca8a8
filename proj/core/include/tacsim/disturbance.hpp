#pragma once

// Magnetic disturbance: the s/(s+d) SNR, earth-field estimation from
// rotation observations, cancellation, and the neighbouring-magnet study.

#include <array>
#include <span>
#include <vector>

#include "tacsim/frame.hpp"
#include "tacsim/sensor_model.hpp"

namespace tacsim::disturbance {

/// s / (s + d). Throws InvalidSignal for s <= 0, InvalidArgument for d < 0.
double snr(double s_ut, double d_ut);

/// `rotation` is the matrix M that carries the reference-frame earth field
/// into the current sensor frame, so the observed change is (M - I) * B_e.
/// For a sensor-to-world orientation R relative to the reference, M = R^T.
struct RotationObservation {
  Mat3 rotation = Mat3::Identity();
  Vec3 delta_b_ut = Vec3::Zero();
};

struct EarthFieldEstimate {
  Vec3 field_ut = Vec3::Zero();  // body frame at the reference orientation
  int rank = 0;
  double condition = 0.0;
  double residual_norm_ut = 0.0;
  Mat3 covariance = Mat3::Zero();  // sigma^2 (A^T A)^-1, sigma^2 from residuals
  std::vector<double> singular_values;
};

/// Relative singular-value cutoff used to decide the rank of the stacked system.
inline constexpr double kRankTolerance = 1e-9;

/// Stacked least squares over all observations via SVD.
/// Throws DegenerateRotation if an observation's rotation is the identity,
/// RankDeficient (with the unobservable axis) if the stack has rank < 3.
EarthFieldEstimate estimate_earth_field(std::span<const RotationObservation> observations);

/// Subtracts R^T * B_e from the SA-II channel; FA-I is untouched.
pipeline::TactileFrame cancel_earth_field(const pipeline::TactileFrame& frame, const Vec3& earth_field_ut,
                                          const Mat3& orientation);
pipeline::RelativeFrame cancel_earth_field(const pipeline::RelativeFrame& frame, const Vec3& earth_field_ut,
                                           const Mat3& orientation);
Vec3 cancel_earth_field(const Vec3& sa2_ut, const Vec3& earth_field_ut, const Mat3& orientation);

enum class SnrContext { EarthRotation, AdjacentMagnet };

struct SnrReport {
  int magnet_id = 0;
  double dy_mm = 0.0;
  double s_ut = 0.0;
  double d_ut = 0.0;
  double snr = 1.0;
  SnrContext context = SnrContext::AdjacentMagnet;
};

struct SnrSweep {
  std::vector<SnrReport> rows;     // magnet-major, dy ascending
  std::vector<double> dy_grid_mm;
  std::vector<int> argmax_magnet;  // per dy
};

/// 4, 5, ..., 30 mm.
std::vector<double> default_dy_grid();

/// For every magnet and dy: s is its effective signal, d the magnitude of the
/// field an identical neighbour at (0, dy, rest gap) produces at the sensor.
SnrSweep adjacent_snr_sweep(std::span<const sensor::MagnetSpec> magnets,
                            std::span<const double> dy_grid_mm,
                            double layer_thickness_mm = sensor::kSa2ThicknessMm);

}  // namespace tacsim::disturbance
