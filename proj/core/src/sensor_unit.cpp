#include "tacsim/sensor_unit.hpp"

#include "tacsim/errors.hpp"

namespace tacsim::sensor {

UnitConfig default_unit_config() { return UnitConfig{}; }

SensorUnit::SensorUnit(UnitConfig config, std::uint8_t finger_id)
    : config_(std::move(config)),
      finger_id_(finger_id),
      noise_(derive_seed(config_.env.seed, finger_id)),
      play_(config_.hysteresis ? config_.sa2.layer.backlash_mm : 0.0) {
  validate(config_.env);
  validate(config_.fa1_layer);
  validate(config_.sa2.layer);
  validate(config_.sa2.magnet);
}

void SensorUnit::set_orientation(const Mat3& sensor_to_world) {
  if (!is_proper_rotation(sensor_to_world)) throw InvalidArgument("orientation is not a proper rotation");
  config_.env.orientation = sensor_to_world;
}

double SensorUnit::effective_normal_mm(double applied_normal_mm) {
  if (!config_.hysteresis) return applied_normal_mm;
  return soft_onset(play_.update(applied_normal_mm), config_.sa2.layer.onset_mm);
}

pipeline::TactileFrame SensorUnit::sample(const ContactStimulus& stimulus, std::int64_t timestamp_us) {
  validate(stimulus, config_.pitch_mm);
  pipeline::TactileFrame frame;
  frame.timestamp_us = timestamp_us;
  frame.finger_id = finger_id_;

  const Fa1Sample fa1 = sample_fa1(stimulus, config_.fa1_layer, config_.env.noise.fa1_sigma_counts,
                                   &noise_, config_.adc, config_.pitch_mm);
  frame.fa1 = fa1.counts;
  last_saturated_ = fa1.saturated;

  Vec3 d = bone_displacement_mm(stimulus.force_n, config_.sa2);
  d.z() = effective_normal_mm(d.z());
  frame.sa2_ut = sample_sa2_at(d, config_.sa2, config_.env, &noise_);
  return frame;
}

}  // namespace tacsim::sensor
