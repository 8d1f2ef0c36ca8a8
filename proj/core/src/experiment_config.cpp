#include "tacsim/experiment_config.hpp"

#include <cmath>

#include <boost/algorithm/string/case_conv.hpp>
#include <fmt/format.h>

#include "tacsim/errors.hpp"

namespace tacsim::config {

const KeyValues& default_values() {
  static const KeyValues defaults{
      {"run.seed", "1"},

      {"noise.fa1_sigma_counts", "2"},
      {"noise.sa2_sigma_ut", "1"},
      {"noise.hall_lsb_ut", "0.15"},

      {"sensor.magnet_id", "2"},
      {"sensor.layer_thickness_mm", "3"},
      {"sensor.bone_area_mm2", "100"},
      {"sensor.backlash_mm", "0.008"},
      {"sensor.onset_mm", "0.2"},
      {"sensor.hysteresis", "true"},
      {"sensor.fa1_peak_fraction", "0.72"},
      {"sensor.pitch_mm", "2.5"},

      {"stream.rate_hz", "250"},
      {"stream.fingers", "2"},
      {"stream.init_samples", "300"},
      {"stream.tail_samples", "100"},
      {"stream.ma_window", "6"},
      {"stream.duration_s", "4"},
      {"stream.press_force_n", "1"},
      {"stream.binary", "false"},

      {"characterize.max_force_n", "2"},
      {"characterize.step_n", "0.25"},
      {"characterize.hold_samples", "25"},
      {"characterize.shear_ratio", "0.2"},
      {"characterize.joint_z_mm", "-10"},
      {"characterize.location_mode", "normalized"},
      {"characterize.z_scaling", "standardize"},
      {"characterize.a_step", "0.05"},
      {"characterize.write_frames", "true"},

      {"disturbance.earth_field_ut", "50"},
      {"disturbance.earth_perp_ut", "32.4604"},
      {"disturbance.rotation_deg", "60"},
      {"disturbance.imu_noise_deg", "0.2"},
      {"disturbance.cycles", "5"},
      {"disturbance.settle_samples", "25"},
      {"disturbance.plateau_samples", "250"},

      {"snr.dy_min_mm", "4"},
      {"snr.dy_max_mm", "30"},
      {"snr.dy_step_mm", "1"},

      {"grasp.object", "egg"},
      {"grasp.policy", "auto"},
      {"grasp.t_g", "700"},
      {"grasp.t_high", "900"},
      {"grasp.t_low", "500"},
      {"grasp.hold_s", "2"},
      {"grasp.a", "0.3"},
      {"grasp.opening_mm", "auto"},
      {"grasp.pinion_radius_mm", "3"},
      {"grasp.max_increments", "360"},
      {"grasp.max_s", "30"},
      {"grasp.post_hold_s", "1"},
      {"grasp.egg_size_mm", "45"},
      {"grasp.egg_stiffness_n_per_mm", "5"},
      {"grasp.egg_crush_n", "25"},
      {"grasp.rigid_size_mm", "30"},
      {"grasp.tweezers_object_mm", "6"},
      {"grasp.tweezers_arm_mm", "14"},
      {"grasp.tweezers_tip_mm", "12"},
      {"grasp.tweezers_spring_n_per_mm", "0.012"},
      {"grasp.object_stiffness_n_per_mm", "3"},
      {"grasp.sizes_mm", "2,4,6,8,10"},
  };
  return defaults;
}

namespace {

class Reader {
 public:
  explicit Reader(const KeyValues& kv) : kv_(kv) {}

  const std::string& raw(const std::string& key) const {
    const auto it = kv_.find(key);
    if (it == kv_.end()) throw ConfigError("missing key " + key);
    return it->second;
  }

  double number(const std::string& key) const {
    const std::string& s = raw(key);
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size() || !std::isfinite(v))
      throw ConfigError(fmt::format("{} = '{}' is not a number", key, s));
    return v;
  }

  int integer(const std::string& key) const {
    const double v = number(key);
    if (v != std::floor(v) || std::abs(v) > 2e9) throw ConfigError(fmt::format("{} must be an integer", key));
    return static_cast<int>(v);
  }

  double positive(const std::string& key) const {
    const double v = number(key);
    if (!(v > 0.0)) throw ConfigError(key + " must be > 0");
    return v;
  }

  double non_negative(const std::string& key) const {
    const double v = number(key);
    if (!(v >= 0.0)) throw ConfigError(key + " must be >= 0");
    return v;
  }

  bool boolean(const std::string& key) const {
    const std::string s = boost::algorithm::to_lower_copy(raw(key));
    if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
    if (s == "false" || s == "0" || s == "no" || s == "off") return false;
    throw ConfigError(fmt::format("{} = '{}' is not a boolean", key, raw(key)));
  }

  std::string choice(const std::string& key, std::initializer_list<const char*> allowed) const {
    const std::string s = boost::algorithm::to_lower_copy(raw(key));
    for (const char* a : allowed)
      if (s == a) return s;
    throw ConfigError(fmt::format("{} = '{}' is not one of {}", key, raw(key), fmt::join(allowed, "|")));
  }

 private:
  const KeyValues& kv_;
};

std::uint64_t parse_seed(const std::string& s) {
  if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos)
    throw ConfigError("seed '" + s + "' is not a non-negative integer");
  try {
    return std::stoull(s);
  } catch (const std::exception&) {
    throw ConfigError("seed '" + s + "' is out of range");
  }
}

}  // namespace

std::uint64_t ExperimentConfig::hash() const { return config_hash(values); }

std::string ExperimentConfig::header(const std::string& experiment) const {
  return fmt::format("tacsim {} config_hash={} seed={}", experiment, hash_hex(hash()), seed);
}

ExperimentConfig make_config(const KeyValues& values, std::optional<std::uint64_t> seed) {
  const KeyValues& defaults = default_values();
  ExperimentConfig cfg;
  cfg.values = defaults;
  for (const auto& [k, v] : values) {
    if (defaults.count(k) == 0U) throw ConfigError("unknown config key '" + k + "'");
    cfg.values[k] = v;
  }
  if (seed) cfg.values["run.seed"] = std::to_string(*seed);
  cfg.seed = parse_seed(cfg.values["run.seed"]);

  const Reader r(cfg.values);

  // Sensor unit.
  sensor::UnitConfig& u = cfg.unit;
  u.env.noise.fa1_sigma_counts = r.non_negative("noise.fa1_sigma_counts");
  u.env.noise.sa2_sigma_ut = r.non_negative("noise.sa2_sigma_ut");
  u.env.noise.hall_lsb_ut = r.non_negative("noise.hall_lsb_ut");
  u.env.seed = cfg.seed;
  const int magnet_id = r.integer("sensor.magnet_id");
  if (magnet_id < 1 || magnet_id > 4) throw ConfigError("sensor.magnet_id must be 1..4");
  const double layer = r.positive("sensor.layer_thickness_mm");
  u.sa2.magnet = sensor::calibrated_magnet(magnet_id, layer);
  u.sa2.layer = sensor::default_sa2_layer();
  u.sa2.layer.thickness_mm = layer;
  u.sa2.layer.backlash_mm = r.non_negative("sensor.backlash_mm");
  u.sa2.layer.onset_mm = r.non_negative("sensor.onset_mm");
  u.sa2.bone_area_mm2 = r.positive("sensor.bone_area_mm2");
  u.hysteresis = r.boolean("sensor.hysteresis");
  u.pitch_mm = r.positive("sensor.pitch_mm");
  u.fa1_layer = sensor::calibrated_fa1_layer(r.positive("sensor.fa1_peak_fraction"), u.adc, u.pitch_mm);

  // Stream.
  pipeline::StreamConfig& s = cfg.stream;
  s.rate_hz = r.integer("stream.rate_hz");
  s.fingers = r.integer("stream.fingers");
  s.init_samples = r.integer("stream.init_samples");
  s.tail_samples = r.integer("stream.tail_samples");
  s.ma_window = r.integer("stream.ma_window");
  try {
    s.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("stream: ") + e.what());
  }
  cfg.stream_run.duration_s = r.positive("stream.duration_s");
  cfg.stream_run.press_force_n = r.non_negative("stream.press_force_n");
  cfg.stream_run.binary = r.boolean("stream.binary");

  // Characterization.
  CharacterizeSettings& c = cfg.characterize;
  c.max_force_n = r.positive("characterize.max_force_n");
  c.step_n = r.positive("characterize.step_n");
  c.hold_samples = r.integer("characterize.hold_samples");
  if (c.hold_samples < 1) throw ConfigError("characterize.hold_samples must be >= 1");
  c.shear_ratio = r.non_negative("characterize.shear_ratio");
  c.joint_z_mm = r.number("characterize.joint_z_mm");
  c.location_mode = r.choice("characterize.location_mode", {"normalized", "literal"}) == "literal"
                        ? estimation::LocationMode::Literal
                        : estimation::LocationMode::Normalized;
  c.z_scaling = r.choice("characterize.z_scaling", {"standardize", "none"}) == "none"
                    ? estimation::ZScaling::None
                    : estimation::ZScaling::Standardize;
  c.a_step = r.positive("characterize.a_step");
  if (c.a_step > 1.0) throw ConfigError("characterize.a_step must be <= 1");
  c.write_frames = r.boolean("characterize.write_frames");

  // Disturbance.
  DisturbanceSettings& d = cfg.disturbance;
  d.earth_field_ut = r.non_negative("disturbance.earth_field_ut");
  d.earth_perp_ut = r.non_negative("disturbance.earth_perp_ut");
  if (d.earth_perp_ut > d.earth_field_ut)
    d.earth_perp_ut = d.earth_field_ut;  // a weaker total field caps the perpendicular part
  d.rotation_deg = r.number("disturbance.rotation_deg");
  if (!(std::abs(std::fmod(d.rotation_deg, 360.0)) > 1e-9)) throw ConfigError("disturbance.rotation_deg must not be a multiple of 360");
  d.imu_noise_deg = r.non_negative("disturbance.imu_noise_deg");
  d.cycles = r.integer("disturbance.cycles");
  d.settle_samples = r.integer("disturbance.settle_samples");
  d.plateau_samples = r.integer("disturbance.plateau_samples");
  if (d.cycles < 1 || d.settle_samples < 0 || d.plateau_samples < 1)
    throw ConfigError("disturbance needs cycles >= 1, settle_samples >= 0, plateau_samples >= 1");

  // SNR sweep.
  SnrSettings& n = cfg.snr;
  n.dy_min_mm = r.positive("snr.dy_min_mm");
  n.dy_max_mm = r.positive("snr.dy_max_mm");
  n.dy_step_mm = r.positive("snr.dy_step_mm");
  if (n.dy_max_mm < n.dy_min_mm) throw ConfigError("snr.dy_max_mm must be >= snr.dy_min_mm");

  // Grasp.
  GraspSettings& g = cfg.grasp;
  const std::string object = r.choice("grasp.object", {"egg", "tweezers", "rigid", "none"});
  g.object = object == "egg" ? grasp::ObjectKind::Egg
             : object == "tweezers" ? grasp::ObjectKind::Tweezers
             : object == "rigid" ? grasp::ObjectKind::Rigid
                                 : grasp::ObjectKind::None;
  g.policy = r.choice("grasp.policy", {"auto", "single", "hysteresis"});
  g.t_g = r.positive("grasp.t_g");
  g.t_high = r.positive("grasp.t_high");
  g.t_low = r.positive("grasp.t_low");
  if (!(g.t_low < g.t_high)) throw ConfigError("grasp.t_low must be < grasp.t_high");
  g.hold_s = r.non_negative("grasp.hold_s");
  g.a = r.non_negative("grasp.a");
  if (g.a > 1.0) throw ConfigError("grasp.a must lie in [0, 1]");
  g.opening_mm = boost::algorithm::to_lower_copy(r.raw("grasp.opening_mm")) == "auto"
                     ? -1.0
                     : r.positive("grasp.opening_mm");
  g.pinion_radius_mm = r.positive("grasp.pinion_radius_mm");
  g.max_increments = r.integer("grasp.max_increments");
  if (g.max_increments < 1) throw ConfigError("grasp.max_increments must be >= 1");
  g.max_s = r.positive("grasp.max_s");
  g.post_hold_s = r.non_negative("grasp.post_hold_s");
  g.egg_size_mm = r.positive("grasp.egg_size_mm");
  g.egg_stiffness_n_per_mm = r.positive("grasp.egg_stiffness_n_per_mm");
  g.egg_crush_n = r.non_negative("grasp.egg_crush_n");
  g.rigid_size_mm = r.positive("grasp.rigid_size_mm");
  g.tweezers_object_mm = r.positive("grasp.tweezers_object_mm");
  g.tweezers_arm_mm = r.positive("grasp.tweezers_arm_mm");
  g.tweezers_tip_mm = r.positive("grasp.tweezers_tip_mm");
  g.tweezers_spring_n_per_mm = r.positive("grasp.tweezers_spring_n_per_mm");
  g.object_stiffness_n_per_mm = r.positive("grasp.object_stiffness_n_per_mm");
  g.sizes_mm = parse_number_list(r.raw("grasp.sizes_mm"), "grasp.sizes_mm");
  for (double v : g.sizes_mm)
    if (!(v > 0.0 && v < g.tweezers_tip_mm)) throw ConfigError("grasp.sizes_mm entries must lie in (0, tip opening)");
  if (g.tweezers_object_mm >= g.tweezers_tip_mm) throw ConfigError("grasp.tweezers_object_mm must be < tip opening");
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& file, const std::vector<std::string>& overrides,
                             std::optional<std::uint64_t> seed) {
  KeyValues kv;
  if (!file.empty()) kv = read_kv_file(file);
  for (const auto& o : overrides) {
    auto [k, v] = parse_override(o);
    kv[k] = v;
  }
  return make_config(kv, seed);
}

grasp::GraspScenario grasp_scenario(const ExperimentConfig& cfg) {
  const GraspSettings& g = cfg.grasp;
  grasp::GraspScenario sc;
  switch (g.object) {
    case grasp::ObjectKind::Egg:
      sc.object = grasp::ObjectModel::egg(g.egg_size_mm, g.egg_stiffness_n_per_mm, g.egg_crush_n);
      break;
    case grasp::ObjectKind::Tweezers:
      sc.object = grasp::ObjectModel::tweezers(g.tweezers_object_mm, g.object_stiffness_n_per_mm);
      sc.object.arm_width_mm = g.tweezers_arm_mm;
      sc.object.tip_opening_mm = g.tweezers_tip_mm;
      sc.object.spring_n_per_mm = g.tweezers_spring_n_per_mm;
      break;
    case grasp::ObjectKind::Rigid:
      sc.object = grasp::ObjectModel::rigid(g.rigid_size_mm, g.object_stiffness_n_per_mm);
      break;
    case grasp::ObjectKind::None:
      sc.object = grasp::ObjectModel::none();
      break;
  }
  const bool hysteresis =
      g.policy == "hysteresis" || (g.policy == "auto" && g.object == grasp::ObjectKind::Tweezers);
  if (hysteresis) sc.policy.mode = grasp::Hysteresis{g.t_high, g.t_low, g.hold_s};
  else sc.policy.mode = grasp::SingleThreshold{g.t_g};
  sc.policy.a = g.a;
  sc.geometry.pinion_radius_mm = g.pinion_radius_mm;
  sc.geometry.max_increments = g.max_increments;
  sc.geometry.opening_mm =
      g.opening_mm > 0.0 ? g.opening_mm : (g.object == grasp::ObjectKind::Tweezers ? 20.0 : 60.0);
  sc.unit = cfg.unit;
  sc.stream = cfg.stream;
  sc.max_s = g.max_s;
  sc.post_hold_s = g.post_hold_s;
  return sc;
}

}  // namespace tacsim::config
