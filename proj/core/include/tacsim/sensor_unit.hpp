#pragma once

// Stateful wrapper around the sensor physics: one simulated unit that keeps
// its own noise stream and the hysteresis state of the SA-II normal axis.

#include <cstdint>

#include "tacsim/frame.hpp"
#include "tacsim/sensor_model.hpp"

namespace tacsim::sensor {

struct UnitConfig {
  Sa2Model sa2{};
  ElastomerSpec fa1_layer = calibrated_fa1_layer();
  Fa1Adc adc{};
  double pitch_mm = kTaxelPitchMm;
  Environment env{};
  bool hysteresis = true;
};

UnitConfig default_unit_config();

class SensorUnit {
 public:
  SensorUnit(UnitConfig config, std::uint8_t finger_id);

  pipeline::TactileFrame sample(const ContactStimulus& stimulus, std::int64_t timestamp_us);

  void set_orientation(const Mat3& sensor_to_world);
  const UnitConfig& config() const { return config_; }
  std::uint8_t finger_id() const { return finger_id_; }
  bool last_saturated() const { return last_saturated_; }

  /// Normal displacement actually seen by the magnet after hysteresis.
  double effective_normal_mm(double applied_normal_mm);

 private:
  UnitConfig config_;
  std::uint8_t finger_id_;
  NoiseSource noise_;
  PlayOperator play_;
  bool last_saturated_ = false;
};

}  // namespace tacsim::sensor
