#pragma once

// Synthetic physics of one tactile unit: an FA-I 4x4 piezoresistive array
// under a pressure footprint, and an SA-II Hall channel observing a magnet
// carried by a compliant bone structure.

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "tacsim/geometry.hpp"
#include "tacsim/rng.hpp"

namespace tacsim::sensor {

/// Cylindrical magnet modelled as a point dipole at its centre, moment along +z.
struct MagnetSpec {
  int id = 2;
  double height_mm = 1.0;
  double diameter_mm = 3.0;
  double dipole_moment = 0.0;  // A*m^2
};
void validate(const MagnetSpec& magnet);

struct ElastomerSpec {
  double elastic_modulus_kpa = 83.0;
  double thickness_mm = 3.0;
  double gauge_factor = 2.0;
  double rest_resistance = 1.0;  // counts-equivalent
  double backlash_mm = 0.0;
  double onset_mm = 0.0;  // soft dead zone at the start of normal travel
};
void validate(const ElastomerSpec& layer);

struct ProbeSpec {
  double cone_height_mm = 3.8;
  double cone_radius_mm = 5.3;
  double footprint_sigma_mm() const { return 0.5 * cone_radius_mm; }
};

struct ContactStimulus {
  Vec2 location_mm = face_center_mm();
  Vec3 force_n = Vec3::Zero();
  ProbeSpec probe{};
};
void validate(const ContactStimulus& stimulus, double pitch_mm = kTaxelPitchMm);

/// Magnet of a neighbouring unit; position of its centre relative to the Hall sensor.
struct NeighborMagnet {
  MagnetSpec magnet;
  Vec3 position_mm = Vec3::Zero();
};

struct NoiseSpec {
  double fa1_sigma_counts = 2.0;
  double sa2_sigma_ut = 1.0;
  double hall_lsb_ut = 0.15;  // 0 disables quantization
};

struct Environment {
  Vec3 earth_field_ut = Vec3::Zero();    // world frame
  Mat3 orientation = Mat3::Identity();   // sensor-to-world
  std::vector<NeighborMagnet> neighbors;
  NoiseSpec noise{};
  std::uint64_t seed = 0;
};
void validate(const Environment& env);

// ---------------------------------------------------------------------------
// Magnets

inline constexpr double kMinDipoleOffsetMm = 0.5;
inline constexpr double kSa2ThicknessMm = 3.0;
inline constexpr double kFa1ThicknessMm = 0.5;

/// Measured effective signals of the four candidate magnets, µT.
inline constexpr std::array<double, 4> kEffectiveSignalsUt{211.0, 580.0, 853.0, 1816.0};

/// Point-dipole flux density in µT at `offset_mm` (field point minus magnet centre).
/// Throws OffsetTooSmall when |offset| <= 0.5 mm.
Vec3 dipole_flux(const MagnetSpec& magnet, const Vec3& offset_mm);

/// |ΔB| at the Hall sensor when the magnet, centred `gap_mm` above it, moves 1 mm along x.
double effective_signal_ut(const MagnetSpec& magnet, double gap_mm);

/// Bisection on the dipole moment so effective_signal_ut() hits the target.
/// Shape fields of `shape` are kept. Throws NoConvergence.
MagnetSpec calibrate_moment(double target_signal_ut, double gap_mm, MagnetSpec shape = {});

/// Distance from the Hall sensor to the magnet centre: layer plus half the magnet height.
double rest_gap_mm(const MagnetSpec& magnet, double layer_thickness_mm = kSa2ThicknessMm);

/// Uncalibrated geometry of candidate magnet `id` (1..4).
MagnetSpec magnet_shape(int id);
MagnetSpec calibrated_magnet(int id, double layer_thickness_mm = kSa2ThicknessMm);
std::array<MagnetSpec, 4> calibrated_magnet_set(double layer_thickness_mm = kSa2ThicknessMm);

// ---------------------------------------------------------------------------
// FA-I layer

struct Fa1Adc {
  std::int32_t full_scale = 1023;
  std::int32_t offset_counts = 8;
};

struct Fa1Sample {
  TaxelCounts counts = TaxelCounts::Zero();
  bool saturated = false;
};

/// Fraction of the ADC range reached by the peak taxel for 2 N at the face centre.
inline constexpr double kFa1CenterPeakFraction = 0.72;

/// Share of the normal force delivered to each taxel by the Gaussian
/// footprint, truncated at the face and renormalized; sums to 1.
TaxelValues footprint_weights(const Vec2& location_mm, double sigma_mm,
                              double pitch_mm = kTaxelPitchMm);

/// Centre of pressure of the truncated footprint, i.e. where an F-T sensor
/// locates the resultant.
Vec2 center_of_pressure(const ContactStimulus& stimulus, double pitch_mm = kTaxelPitchMm);

/// Noise-free reading rest_resistance * K * strain per taxel (real counts, no ADC offset).
TaxelValues fa1_response(const ContactStimulus& stimulus, const ElastomerSpec& layer,
                         double pitch_mm = kTaxelPitchMm);

/// Sum of fa1_response per newton of normal force.
double fa1_counts_per_newton(const ElastomerSpec& layer, double pitch_mm = kTaxelPitchMm);

/// FA-I layer whose rest_resistance puts the 2 N centre-press peak at
/// `peak_fraction` of the ADC range.
ElastomerSpec calibrated_fa1_layer(double peak_fraction = kFa1CenterPeakFraction,
                                   const Fa1Adc& adc = {}, double pitch_mm = kTaxelPitchMm);

/// Offset + response + noise, rounded and clipped to the ADC range.
/// `noise` may be null for a noise-free sample.
Fa1Sample sample_fa1(const ContactStimulus& stimulus, const ElastomerSpec& layer,
                     double sigma_counts, NoiseSource* noise, const Fa1Adc& adc = {},
                     double pitch_mm = kTaxelPitchMm);

// ---------------------------------------------------------------------------
// SA-II layer

inline constexpr double kMechanicalStopFraction = 0.8;

ElastomerSpec default_sa2_layer();

struct Sa2Model {
  MagnetSpec magnet = calibrated_magnet(2);
  ElastomerSpec layer = default_sa2_layer();
  double bone_area_mm2 = 100.0;  // 4e x 4e face
};

/// Diagonal, isotropic compliance L / (E * A), mm per newton.
double compliance_mm_per_n(const ElastomerSpec& layer, double bone_area_mm2);

/// Bone displacement C * F; z is compression towards the Hall sensor.
/// Throws DisplacementOutOfRange beyond 80% of the layer thickness.
Vec3 bone_displacement_mm(const Vec3& force_n, const Sa2Model& model);

/// Field of the unit's own magnet at the sensor for a given bone displacement.
Vec3 own_magnet_field_ut(const Vec3& displacement_mm, const Sa2Model& model);

/// Body-frame Hall reading: own magnet + R^T * B_e + neighbours, noise, quantization,
/// then rounded to float precision (the chip reports single-precision values).
Vec3 sample_sa2_at(const Vec3& displacement_mm, const Sa2Model& model, const Environment& env,
                   NoiseSource* noise);

Vec3 sample_sa2(const ContactStimulus& stimulus, const Sa2Model& model, const Environment& env,
                NoiseSource* noise);

// ---------------------------------------------------------------------------
// Hysteresis

/// Play operator whose output follows the input while loading and lags it by
/// up to `width` while unloading: y = clamp(y_prev, x, x + width).
class PlayOperator {
 public:
  explicit PlayOperator(double width_mm, double initial_mm = 0.0);
  double update(double x_mm);
  double output() const { return y_; }

 private:
  double width_;
  double y_;
};

/// C1 soft dead zone: x^2 / (2d) below d, x - d/2 above, 0 for x <= 0.
double soft_onset(double x_mm, double onset_mm);

/// Play operator of width `backlash_mm` followed by soft_onset(onset_mm).
/// backlash 0 and onset 0 is the identity.
std::vector<double> apply_hysteresis(std::span<const double> displacement_mm, double backlash_mm,
                                     double onset_mm = 0.0);

}  // namespace tacsim::sensor
