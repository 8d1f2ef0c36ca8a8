#include "tacsim/sensor_model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tacsim/errors.hpp"

namespace tacsim::sensor {

namespace {

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }
double normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI); }

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) throw InvalidArgument(std::string(what) + " must be > 0");
}

/// Per-axis truncated Gaussian mass in each of the four taxel cells, renormalized.
Eigen::Vector4d axis_weights(double center, double sigma, double pitch) {
  Eigen::Vector4d w;
  for (int i = 0; i < 4; ++i) {
    const double lo = pitch * (i + 0.5);
    const double hi = pitch * (i + 1.5);
    w[i] = normal_cdf((hi - center) / sigma) - normal_cdf((lo - center) / sigma);
  }
  return w / w.sum();
}

double truncated_mean(double center, double sigma, double lo, double hi) {
  const double a = (lo - center) / sigma;
  const double b = (hi - center) / sigma;
  return center + sigma * (normal_pdf(a) - normal_pdf(b)) / (normal_cdf(b) - normal_cdf(a));
}

}  // namespace

void validate(const MagnetSpec& magnet) {
  require_positive(magnet.height_mm, "magnet height");
  require_positive(magnet.diameter_mm, "magnet diameter");
  require_positive(magnet.dipole_moment, "dipole moment");
}

void validate(const ElastomerSpec& layer) {
  require_positive(layer.elastic_modulus_kpa, "elastic modulus");
  require_positive(layer.thickness_mm, "layer thickness");
  require_positive(layer.gauge_factor, "gauge factor");
  require_positive(layer.rest_resistance, "rest resistance");
  if (!(layer.backlash_mm >= 0.0)) throw InvalidArgument("backlash must be >= 0");
  if (!(layer.onset_mm >= 0.0)) throw InvalidArgument("onset must be >= 0");
}

void validate(const ContactStimulus& stimulus, double pitch_mm) {
  if (!stimulus.force_n.allFinite() || !stimulus.location_mm.allFinite())
    throw InvalidArgument("stimulus must be finite");
  if (stimulus.force_n.z() < 0.0) throw InvalidArgument("normal force must be >= 0 (pressing only)");
  const double lo = face_min_mm(pitch_mm);
  const double hi = face_max_mm(pitch_mm);
  if ((stimulus.location_mm.array() < lo).any() || (stimulus.location_mm.array() > hi).any())
    throw InvalidArgument("contact location outside the sensing face");
  require_positive(stimulus.probe.cone_radius_mm, "probe radius");
}

void validate(const Environment& env) {
  if (!is_proper_rotation(env.orientation)) throw InvalidArgument("orientation is not a proper rotation");
  if (!(env.noise.fa1_sigma_counts >= 0.0) || !(env.noise.sa2_sigma_ut >= 0.0) ||
      !(env.noise.hall_lsb_ut >= 0.0))
    throw InvalidArgument("noise parameters must be >= 0");
  if (!env.earth_field_ut.allFinite()) throw InvalidArgument("earth field must be finite");
  for (const auto& n : env.neighbors) validate(n.magnet);
}

Vec3 dipole_flux(const MagnetSpec& magnet, const Vec3& offset_mm) {
  const double r_mm = offset_mm.norm();
  if (!(r_mm > kMinDipoleOffsetMm))
    throw OffsetTooSmall("dipole offset " + std::to_string(r_mm) + " mm is within 0.5 mm");
  const Vec3 rhat = offset_mm / r_mm;
  const Vec3 m(0.0, 0.0, magnet.dipole_moment);
  const double r_m = r_mm * 1e-3;
  // mu0 / 4pi = 1e-7 T*m/A; 1 T = 1e6 uT.
  constexpr double kScale = 1e-7 * 1e6;
  return kScale * (3.0 * m.dot(rhat) * rhat - m) / (r_m * r_m * r_m);
}

double effective_signal_ut(const MagnetSpec& magnet, double gap_mm) {
  require_positive(gap_mm, "gap");
  const Vec3 rest(0.0, 0.0, -gap_mm);
  const Vec3 moved(-1.0, 0.0, -gap_mm);
  return (dipole_flux(magnet, moved) - dipole_flux(magnet, rest)).norm();
}

MagnetSpec calibrate_moment(double target_signal_ut, double gap_mm, MagnetSpec shape) {
  if (!(target_signal_ut > 0.0) || !std::isfinite(target_signal_ut))
    throw NoConvergence("target effective signal must be a positive finite value");
  require_positive(gap_mm, "gap");

  constexpr int kMaxIterations = 200;
  auto signal_at = [&](double moment) {
    MagnetSpec m = shape;
    m.dipole_moment = moment;
    return effective_signal_ut(m, gap_mm);
  };

  double lo = 0.0;
  double hi = 1e-6;
  int iterations = 0;
  while (signal_at(hi) < target_signal_ut) {
    lo = hi;
    hi *= 2.0;
    if (++iterations >= kMaxIterations) throw NoConvergence("could not bracket the target moment");
  }
  while (iterations++ < kMaxIterations) {
    const double mid = 0.5 * (lo + hi);
    const double s = signal_at(mid);
    if (std::abs(s - target_signal_ut) <= 1e-12 * target_signal_ut || mid == lo || mid == hi) {
      shape.dipole_moment = mid;
      return shape;
    }
    (s < target_signal_ut ? lo : hi) = mid;
  }
  throw NoConvergence("bisection did not converge in 200 iterations");
}

double rest_gap_mm(const MagnetSpec& magnet, double layer_thickness_mm) {
  return layer_thickness_mm + 0.5 * magnet.height_mm;
}

MagnetSpec magnet_shape(int id) {
  switch (id) {
    case 1: return {1, 2.0, 1.5, 0.0};
    case 2: return {2, 1.0, 3.0, 0.0};
    case 3: return {3, 2.0, 3.0, 0.0};
    case 4: return {4, 3.0, 4.0, 0.0};
    default: throw InvalidArgument("magnet id must be 1..4, got " + std::to_string(id));
  }
}

MagnetSpec calibrated_magnet(int id, double layer_thickness_mm) {
  const MagnetSpec shape = magnet_shape(id);
  return calibrate_moment(kEffectiveSignalsUt[static_cast<std::size_t>(id - 1)],
                          rest_gap_mm(shape, layer_thickness_mm), shape);
}

std::array<MagnetSpec, 4> calibrated_magnet_set(double layer_thickness_mm) {
  std::array<MagnetSpec, 4> set;
  for (int id = 1; id <= 4; ++id) set[static_cast<std::size_t>(id - 1)] = calibrated_magnet(id, layer_thickness_mm);
  return set;
}

// ---------------------------------------------------------------------------

TaxelValues footprint_weights(const Vec2& location_mm, double sigma_mm, double pitch_mm) {
  require_positive(sigma_mm, "footprint sigma");
  const Eigen::Vector4d wx = axis_weights(location_mm.x(), sigma_mm, pitch_mm);
  const Eigen::Vector4d wy = axis_weights(location_mm.y(), sigma_mm, pitch_mm);
  return wy * wx.transpose();  // (row, col)
}

Vec2 center_of_pressure(const ContactStimulus& stimulus, double pitch_mm) {
  const double sigma = stimulus.probe.footprint_sigma_mm();
  const double lo = face_min_mm(pitch_mm);
  const double hi = face_max_mm(pitch_mm);
  return {truncated_mean(stimulus.location_mm.x(), sigma, lo, hi),
          truncated_mean(stimulus.location_mm.y(), sigma, lo, hi)};
}

double fa1_counts_per_newton(const ElastomerSpec& layer, double pitch_mm) {
  // strain = P / E with P = F * w / A_taxel; reading = R0 * K * strain.
  const double modulus_pa = layer.elastic_modulus_kpa * 1e3;
  const double taxel_area_m2 = pitch_mm * pitch_mm * 1e-6;
  return layer.rest_resistance * layer.gauge_factor / (modulus_pa * taxel_area_m2);
}

TaxelValues fa1_response(const ContactStimulus& stimulus, const ElastomerSpec& layer,
                         double pitch_mm) {
  validate(stimulus, pitch_mm);
  const TaxelValues w =
      footprint_weights(stimulus.location_mm, stimulus.probe.footprint_sigma_mm(), pitch_mm);
  return w * (stimulus.force_n.z() * fa1_counts_per_newton(layer, pitch_mm));
}

ElastomerSpec calibrated_fa1_layer(double peak_fraction, const Fa1Adc& adc, double pitch_mm) {
  require_positive(peak_fraction, "peak fraction");
  ElastomerSpec layer;
  layer.thickness_mm = kFa1ThicknessMm;
  layer.gauge_factor = 2.0;
  layer.rest_resistance = 1.0;
  const double peak_weight =
      footprint_weights(face_center_mm(pitch_mm), ProbeSpec{}.footprint_sigma_mm(), pitch_mm).maxCoeff();
  const double target_peak = peak_fraction * adc.full_scale;
  layer.rest_resistance = target_peak / (2.0 * peak_weight * fa1_counts_per_newton(layer, pitch_mm));
  return layer;
}

Fa1Sample sample_fa1(const ContactStimulus& stimulus, const ElastomerSpec& layer,
                     double sigma_counts, NoiseSource* noise, const Fa1Adc& adc, double pitch_mm) {
  const TaxelValues response = fa1_response(stimulus, layer, pitch_mm);
  Fa1Sample out;
  for (int r = 0; r < kTaxelRows; ++r) {
    for (int c = 0; c < kTaxelCols; ++c) {
      double v = adc.offset_counts + response(r, c);
      if (noise != nullptr) v += noise->gaussian(sigma_counts);
      const double rounded = std::round(v);
      if (rounded > adc.full_scale) out.saturated = true;
      out.counts(r, c) = static_cast<std::int32_t>(std::clamp(rounded, 0.0, double(adc.full_scale)));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

ElastomerSpec default_sa2_layer() {
  ElastomerSpec layer;
  layer.thickness_mm = kSa2ThicknessMm;
  layer.gauge_factor = 1.0;
  layer.rest_resistance = 1.0;
  layer.backlash_mm = 0.008;
  layer.onset_mm = 0.2;
  return layer;
}

double compliance_mm_per_n(const ElastomerSpec& layer, double bone_area_mm2) {
  require_positive(bone_area_mm2, "bone area");
  // L / (E A) with L in mm, E in kPa (mN/mm^2), A in mm^2 -> mm/mN; x1e3 for mm/N.
  return layer.thickness_mm / (layer.elastic_modulus_kpa * bone_area_mm2) * 1e3;
}

namespace {
void check_stop(const Vec3& displacement_mm, const ElastomerSpec& layer) {
  const double stop = kMechanicalStopFraction * layer.thickness_mm;
  if (!(displacement_mm.norm() <= stop))
    throw DisplacementOutOfRange("bone displacement " + std::to_string(displacement_mm.norm()) +
                                 " mm exceeds mechanical stop " + std::to_string(stop) + " mm");
}
}  // namespace

Vec3 bone_displacement_mm(const Vec3& force_n, const Sa2Model& model) {
  const Vec3 d = compliance_mm_per_n(model.layer, model.bone_area_mm2) * force_n;
  check_stop(d, model.layer);
  return d;
}

Vec3 own_magnet_field_ut(const Vec3& displacement_mm, const Sa2Model& model) {
  const double gap = rest_gap_mm(model.magnet, model.layer.thickness_mm);
  const Vec3 magnet_center(displacement_mm.x(), displacement_mm.y(), gap - displacement_mm.z());
  return dipole_flux(model.magnet, -magnet_center);
}

Vec3 sample_sa2_at(const Vec3& displacement_mm, const Sa2Model& model, const Environment& env,
                   NoiseSource* noise) {
  check_stop(displacement_mm, model.layer);
  Vec3 b = own_magnet_field_ut(displacement_mm, model);
  b += env.orientation.transpose() * env.earth_field_ut;
  for (const auto& n : env.neighbors) b += dipole_flux(n.magnet, -n.position_mm);
  for (int i = 0; i < 3; ++i) {
    double v = b[i];
    if (noise != nullptr) v += noise->gaussian(env.noise.sa2_sigma_ut);
    if (env.noise.hall_lsb_ut > 0.0) v = std::round(v / env.noise.hall_lsb_ut) * env.noise.hall_lsb_ut;
    b[i] = static_cast<double>(static_cast<float>(v));
  }
  return b;
}

Vec3 sample_sa2(const ContactStimulus& stimulus, const Sa2Model& model, const Environment& env,
                NoiseSource* noise) {
  validate(stimulus);
  return sample_sa2_at(bone_displacement_mm(stimulus.force_n, model), model, env, noise);
}

// ---------------------------------------------------------------------------

PlayOperator::PlayOperator(double width_mm, double initial_mm) : width_(width_mm), y_(initial_mm) {
  if (!(width_mm >= 0.0)) throw InvalidArgument("play width must be >= 0");
}

double PlayOperator::update(double x_mm) {
  y_ = std::clamp(y_, x_mm, x_mm + width_);
  return y_;
}

double soft_onset(double x_mm, double onset_mm) {
  if (onset_mm == 0.0) return x_mm;
  if (x_mm <= 0.0) return 0.0;
  if (x_mm < onset_mm) return x_mm * x_mm / (2.0 * onset_mm);
  return x_mm - 0.5 * onset_mm;
}

std::vector<double> apply_hysteresis(std::span<const double> displacement_mm, double backlash_mm,
                                     double onset_mm) {
  if (!(onset_mm >= 0.0)) throw InvalidArgument("onset must be >= 0");
  std::vector<double> out;
  out.reserve(displacement_mm.size());
  if (displacement_mm.empty()) return out;
  PlayOperator play(backlash_mm, displacement_mm.front());
  for (double x : displacement_mm) out.push_back(soft_onset(play.update(x), onset_mm));
  return out;
}

}  // namespace tacsim::sensor
