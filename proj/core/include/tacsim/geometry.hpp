#pragma once

#include <cstdint>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace tacsim {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Raw FA-I readings, indexed (row, col), 0-based.
using TaxelCounts = Eigen::Matrix<std::int32_t, 4, 4>;
/// Baseline-relative FA-I readings.
using TaxelValues = Eigen::Matrix4d;

inline constexpr int kTaxelRows = 4;
inline constexpr int kTaxelCols = 4;
inline constexpr int kTaxelCount = kTaxelRows * kTaxelCols;
inline constexpr int kSa2Channels = 3;
inline constexpr int kChannelsPerFinger = kTaxelCount + kSa2Channels;  // 19

/// FA-I taxel pitch e.
inline constexpr double kTaxelPitchMm = 2.5;

// Sensor face coordinates: taxel (r, c) (0-based) is centred at
// (e * (c + 1), e * (r + 1)), so the array centre sits at (2.5e, 2.5e) and
// the face spans [e/2, 4.5e] on both axes.

inline Vec2 taxel_center_mm(int row, int col, double pitch_mm = kTaxelPitchMm) {
  return {pitch_mm * (col + 1), pitch_mm * (row + 1)};
}

inline Vec2 face_center_mm(double pitch_mm = kTaxelPitchMm) {
  return {2.5 * pitch_mm, 2.5 * pitch_mm};
}

inline double face_min_mm(double pitch_mm = kTaxelPitchMm) { return 0.5 * pitch_mm; }
inline double face_max_mm(double pitch_mm = kTaxelPitchMm) { return 4.5 * pitch_mm; }

bool is_proper_rotation(const Mat3& r, double tol = 1e-9);

/// Right-handed rotation of `angle_rad` about `axis` (need not be unit).
Mat3 rotation_about(const Vec3& axis, double angle_rad);

}  // namespace tacsim
