#include "tacsim/experiments.hpp"

#include <cmath>
#include <fstream>
#include <numeric>

#include <fmt/format.h>

#include "tacsim/calibration_io.hpp"
#include "tacsim/errors.hpp"
#include "tacsim/frame_codec.hpp"
#include "tacsim/sensor_unit.hpp"
#include "tacsim/signal_pipeline.hpp"

namespace tacsim::experiments {

namespace {

/// Text artifact that opens with the config-hash comment line.
class Artifact {
 public:
  Artifact(const std::filesystem::path& dir, const std::string& name, const std::string& header_line)
      : out_(dir / name) {
    if (!out_) throw InvalidArgument("cannot open " + (dir / name).string() + " for writing");
    out_ << "# " << header_line << '\n';
  }
  template <typename... Args>
  void line(fmt::format_string<Args...> f, Args&&... args) {
    out_ << fmt::format(f, std::forward<Args>(args)...) << '\n';
  }

 private:
  std::ofstream out_;
};

void ensure_dir(const std::filesystem::path& dir) {
  if (!dir.empty()) std::filesystem::create_directories(dir);
}

double rmse(double sum_sq, int count) { return count > 0 ? std::sqrt(sum_sq / count) : 0.0; }

Vec3 joint_center(const config::ExperimentConfig& cfg) {
  const Vec2 c = face_center_mm(cfg.unit.pitch_mm);
  return {c.x(), c.y(), cfg.characterize.joint_z_mm};
}

estimation::CalibrationParams fit_with_scan(const std::vector<estimation::CharacterizationSweep>& sweeps,
                                            const config::ExperimentConfig& cfg) {
  const auto& c = cfg.characterize;
  const estimation::ASelection sel = estimation::select_a(sweeps, c.a_step, c.z_scaling);
  estimation::CalibrationParams p = estimation::fit_calibration(sweeps, sel.a, c.z_scaling, cfg.unit.pitch_mm);
  p.diagnostics.a_grid = sel.grid;
  p.diagnostics.a_rmsd_n = sel.rmsd_n;
  return p;
}

void write_calibration_artifacts(const std::filesystem::path& dir, const estimation::CalibrationParams& p,
                                 const config::ExperimentConfig& cfg, const std::string& experiment) {
  estimation::CalibrationFile file{p, {}};
  file.metadata["created_by"] = "tacsim " + experiment;
  file.metadata["config_hash"] = config::hash_hex(cfg.hash());
  file.metadata["seed"] = std::to_string(cfg.seed);
  estimation::write_calibration(dir / "calibration.ini", file, {cfg.header(experiment)});

  Artifact scan(dir, "a_scan.csv", cfg.header(experiment));
  scan.line("a,rmsd_n");
  for (std::size_t i = 0; i < p.diagnostics.a_grid.size(); ++i)
    scan.line("{},{}", p.diagnostics.a_grid[i], p.diagnostics.a_rmsd_n[i]);
}

CharacterizeReport evaluate_impl(const std::vector<estimation::CharacterizationSweep>& sweeps,
                                 const estimation::CalibrationParams& params, const config::ExperimentConfig& cfg,
                                 std::vector<std::string>* rows) {
  CharacterizeReport rep;
  rep.params = params;
  const Vec3 joint = joint_center(cfg);
  double torque_sq_all = 0.0;
  int torque_n_all = 0;
  for (const auto& sweep : sweeps) {
    LocationReport lr;
    lr.label = sweep.location_label;
    double loc_sq = 0.0;
    double force_sq = 0.0;
    double torque_sq = 0.0;
    for (const auto& s : sweep.samples) {
      ++lr.samples;
      const Vec3 f = estimation::estimate_force(s.frame, params);
      force_sq += (f - s.force_n).squaredNorm();
      if (!(s.force_n.z() > 0.0)) continue;
      ++lr.contact_samples;
      const Vec2 loc = estimation::estimate_location(s.frame.fa1, params.pitch_mm, cfg.characterize.location_mode);
      loc_sq += (loc - s.location_mm).squaredNorm();
      const Vec3 tau = estimation::estimate_torque(loc, f, joint);
      const Vec3 tau_true = estimation::estimate_torque(s.location_mm, s.force_n, joint);
      torque_sq += (tau - tau_true).squaredNorm();
      if (rows != nullptr) {
        rows->push_back(fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}", sweep.location_label,
                                    s.force_n.z(), s.location_mm.x(), s.location_mm.y(), loc.x(), loc.y(),
                                    s.force_n.x(), s.force_n.y(), s.force_n.z(), f.x(), f.y(), f.z(), tau_true.x(),
                                    tau_true.y(), tau_true.z(), tau.x(), tau.y(), tau.z()));
      }
    }
    lr.location_rmse_mm = rmse(loc_sq, lr.contact_samples);
    lr.force_rmse_n = rmse(force_sq, 3 * lr.samples);
    lr.torque_rmse_nmm = rmse(torque_sq, 3 * lr.contact_samples);
    torque_sq_all += torque_sq;
    torque_n_all += 3 * lr.contact_samples;
    rep.locations.push_back(lr);
  }
  rep.torque_rmse_nmm = rmse(torque_sq_all, torque_n_all);
  return rep;
}

}  // namespace

const std::array<PressLocation, 5>& press_locations() {
  static const std::array<PressLocation, 5> locations{{
      {"L1", {5.0, 7.5}, {1.0, 0.0}},
      {"L2", {7.5, 7.5}, {0.0, 1.0}},
      {"L3", {5.0, 5.0}, {-1.0, 0.0}},
      {"L4", {6.25, 6.25}, {M_SQRT1_2, M_SQRT1_2}},
      {"L5", {7.5, 5.0}, {0.0, -1.0}},
  }};
  return locations;
}

std::vector<estimation::CharacterizationSweep> simulate_sweeps(const config::ExperimentConfig& cfg,
                                                               std::uint64_t seed,
                                                               const std::filesystem::path& frame_dir,
                                                               const std::string& experiment) {
  const auto& c = cfg.characterize;
  const std::vector<double> grid = estimation::force_grid(c.max_force_n, c.step_n);
  const std::int64_t period = cfg.stream.period_us();
  std::vector<estimation::CharacterizationSweep> sweeps;
  for (std::size_t li = 0; li < press_locations().size(); ++li) {
    const PressLocation& loc = press_locations()[li];
    sensor::UnitConfig ucfg = cfg.unit;
    ucfg.env.seed = derive_seed(seed, li + 1);
    sensor::SensorUnit unit(ucfg, 0);
    pipeline::StreamProcessor proc(cfg.stream);

    std::optional<pipeline::FrameLogWriter> log;
    if (!frame_dir.empty())
      log.emplace(frame_dir / fmt::format("frames_{}.csv", loc.label),
                  std::vector<std::string>{cfg.header(experiment) + fmt::format(" sweep_seed={} location={}", seed,
                                                                                loc.label)});

    sensor::ContactStimulus stim;
    stim.location_mm = loc.target_mm;
    std::int64_t tick = 0;
    auto step = [&]() {
      const pipeline::TactileFrame frame = unit.sample(stim, tick++ * period);
      if (log) log->write(frame);
      return proc.feed(frame);
    };
    for (int i = 0; i < cfg.stream.init_samples; ++i) step();

    estimation::CharacterizationSweep sweep;
    sweep.location_label = loc.label;
    sweep.target_mm = loc.target_mm;
    for (double fz : grid) {
      stim.force_n = {c.shear_ratio * fz * loc.shear_dir.x(), c.shear_ratio * fz * loc.shear_dir.y(), fz};
      std::optional<pipeline::RelativeFrame> last;
      for (int i = 0; i < c.hold_samples; ++i) last = step();
      estimation::SweepSample sample;
      sample.frame = *last;
      sample.force_n = stim.force_n;
      sample.location_mm = sensor::center_of_pressure(stim, ucfg.pitch_mm);
      sweep.samples.push_back(sample);
    }
    sweeps.push_back(std::move(sweep));
  }
  return sweeps;
}

CharacterizeReport evaluate(const std::vector<estimation::CharacterizationSweep>& sweeps,
                            const estimation::CalibrationParams& params, const config::ExperimentConfig& cfg) {
  return evaluate_impl(sweeps, params, cfg, nullptr);
}

CharacterizeReport run_characterize(const config::ExperimentConfig& cfg, const std::filesystem::path& out_dir) {
  ensure_dir(out_dir);
  const auto fit_sweeps = simulate_sweeps(cfg, cfg.seed);
  const estimation::CalibrationParams params = fit_with_scan(fit_sweeps, cfg);
  const auto eval_sweeps = simulate_sweeps(
      cfg, cfg.seed + 1, cfg.characterize.write_frames ? out_dir : std::filesystem::path{}, "characterize");

  std::vector<std::string> rows;
  CharacterizeReport rep = evaluate_impl(eval_sweeps, params, cfg, out_dir.empty() ? nullptr : &rows);
  if (out_dir.empty()) return rep;

  const std::string header = cfg.header("characterize");
  write_calibration_artifacts(out_dir, params, cfg, "characterize");
  {
    Artifact f(out_dir, "characterization_rmse.csv", header);
    f.line("location,samples,contact_samples,location_rmse_mm,force_rmse_n,torque_rmse_nmm");
    for (const auto& l : rep.locations)
      f.line("{},{},{},{},{},{}", l.label, l.samples, l.contact_samples, l.location_rmse_mm, l.force_rmse_n,
             l.torque_rmse_nmm);
    f.line("all,,,,,{}", rep.torque_rmse_nmm);
  }
  {
    Artifact f(out_dir, "characterization_samples.csv", header);
    f.line("location,fz_n,gt_x_mm,gt_y_mm,est_x_mm,est_y_mm,gt_fx_n,gt_fy_n,gt_fz_n,est_fx_n,est_fy_n,est_fz_n,"
           "gt_tx_nmm,gt_ty_nmm,gt_tz_nmm,est_tx_nmm,est_ty_nmm,est_tz_nmm");
    for (const auto& r : rows) f.line("{}", r);
  }
  return rep;
}

estimation::CalibrationParams run_calibrate(const config::ExperimentConfig& cfg, const std::filesystem::path& out_dir) {
  ensure_dir(out_dir);
  const auto sweeps = simulate_sweeps(cfg, cfg.seed);
  const estimation::CalibrationParams params = fit_with_scan(sweeps, cfg);
  if (!out_dir.empty()) write_calibration_artifacts(out_dir, params, cfg, "calibrate");
  return params;
}

// ---------------------------------------------------------------------------

DisturbanceReport run_disturbance(const config::ExperimentConfig& cfg, const std::filesystem::path& out_dir) {
  ensure_dir(out_dir);
  const auto& d = cfg.disturbance;
  DisturbanceReport rep;

  NoiseSource scenario_rng(derive_seed(cfg.seed, 0xD1));
  const double azimuth = scenario_rng.uniform(0.0, 2.0 * M_PI);
  const double parallel = std::sqrt(std::max(0.0, d.earth_field_ut * d.earth_field_ut - d.earth_perp_ut * d.earth_perp_ut));
  const Vec3 b_world(parallel, d.earth_perp_ut * std::cos(azimuth), d.earth_perp_ut * std::sin(azimuth));
  rep.true_field_ut = b_world;  // reference orientation is the identity

  sensor::UnitConfig ucfg = cfg.unit;
  ucfg.env.earth_field_ut = b_world;
  ucfg.env.seed = derive_seed(cfg.seed, 0xD2);
  sensor::SensorUnit unit(ucfg, 0);
  rep.s_ut = sensor::effective_signal_ut(ucfg.sa2.magnet, sensor::rest_gap_mm(ucfg.sa2.magnet, ucfg.sa2.layer.thickness_mm));

  NoiseSource imu_rng(derive_seed(cfg.seed, 0xD3));
  const double imu_sigma = d.imu_noise_deg * M_PI / 180.0;
  auto imu_reading = [&](const Mat3& truth) {
    return Mat3(truth * rotation_about(Vec3::UnitX(), imu_rng.gaussian(imu_sigma)) *
                rotation_about(Vec3::UnitY(), imu_rng.gaussian(imu_sigma)) *
                rotation_about(Vec3::UnitZ(), imu_rng.gaussian(imu_sigma)));
  };

  const sensor::ContactStimulus idle{};
  const std::int64_t period = cfg.stream.period_us();
  std::int64_t tick = 0;
  const double angle = d.rotation_deg * M_PI / 180.0;

  // Calibration phase: pi/3 about each body axis, back to reference in between.
  pipeline::StreamProcessor cal(cfg.stream);
  unit.set_orientation(Mat3::Identity());
  for (int i = 0; i < cfg.stream.init_samples; ++i) cal.feed(unit.sample(idle, tick++ * period));
  auto hold = [&](const Mat3& r, auto&& consume) {
    unit.set_orientation(r);
    for (int i = 0; i < d.settle_samples + d.plateau_samples; ++i)
      consume(unit.sample(idle, tick++ * period), i >= d.settle_samples);
  };
  std::vector<disturbance::RotationObservation> observations;
  for (const Vec3& axis : {Vec3(Vec3::UnitX()), Vec3(Vec3::UnitY()), Vec3(Vec3::UnitZ())}) {
    const Mat3 r = rotation_about(axis, angle);
    Vec3 sum = Vec3::Zero();
    int count = 0;
    hold(r, [&](const pipeline::TactileFrame& f, bool use) {
      const auto rel = cal.feed(f);
      if (use) {
        sum += rel->sa2_ut;
        ++count;
      }
    });
    observations.push_back({imu_reading(r).transpose(), sum / count});
    hold(Mat3::Identity(), [&](const pipeline::TactileFrame& f, bool) { cal.feed(f); });
  }
  rep.estimate = disturbance::estimate_earth_field(observations);
  const Vec3 b_hat = rep.estimate.field_ut;

  // Test phase: periodic x rotations, uncorrected vs corrected streams.
  pipeline::StreamProcessor raw(cfg.stream);
  pipeline::StreamProcessor corrected(cfg.stream);
  Mat3 imu = imu_reading(Mat3::Identity());
  unit.set_orientation(Mat3::Identity());
  for (int i = 0; i < cfg.stream.init_samples; ++i) {
    const auto f = unit.sample(idle, tick++ * period);
    raw.feed(f);
    corrected.feed(disturbance::cancel_earth_field(f, b_hat, imu));
  }
  std::vector<std::string> trace;
  Vec3 sum_raw = Vec3::Zero();
  Vec3 sum_corr = Vec3::Zero();
  int count = 0;
  for (int cycle = 0; cycle < d.cycles; ++cycle) {
    for (const bool rotated : {false, true}) {
      const Mat3 r = rotated ? rotation_about(Vec3::UnitX(), angle) : Mat3::Identity();
      imu = imu_reading(r);
      hold(r, [&](const pipeline::TactileFrame& f, bool use) {
        const auto a = raw.feed(f);
        const auto b = corrected.feed(disturbance::cancel_earth_field(f, b_hat, imu));
        if (!out_dir.empty())
          trace.push_back(fmt::format("{},{},{},{},{},{},{},{},{}", f.timestamp_us, cycle,
                                      rotated ? d.rotation_deg : 0.0, a->sa2_ut.x(), a->sa2_ut.y(), a->sa2_ut.z(),
                                      b->sa2_ut.x(), b->sa2_ut.y(), b->sa2_ut.z()));
        if (use && rotated) {
          sum_raw += a->sa2_ut;
          sum_corr += b->sa2_ut;
          ++count;
        }
      });
    }
  }
  rep.d_before_ut = (sum_raw / count).norm();
  rep.d_after_ut = (sum_corr / count).norm();
  rep.snr_before = disturbance::snr(rep.s_ut, rep.d_before_ut);
  rep.snr_after = disturbance::snr(rep.s_ut, rep.d_after_ut);
  rep.reduction = 1.0 - rep.snr_before;
  rep.recovery_amplitude = rep.reduction > 0.0 ? (rep.snr_after - rep.snr_before) / rep.reduction : 0.0;
  rep.recovery_power =
      rep.d_before_ut > 0.0 ? 1.0 - (rep.d_after_ut / rep.d_before_ut) * (rep.d_after_ut / rep.d_before_ut) : 0.0;

  if (out_dir.empty()) return rep;
  const std::string header = cfg.header("disturbance");
  {
    Artifact f(out_dir, "earth_field.txt", header);
    const auto& e = rep.estimate;
    f.line("[earth_field]");
    f.line("b_x_ut = {}\nb_y_ut = {}\nb_z_ut = {}", e.field_ut.x(), e.field_ut.y(), e.field_ut.z());
    f.line("true_b_x_ut = {}\ntrue_b_y_ut = {}\ntrue_b_z_ut = {}", rep.true_field_ut.x(), rep.true_field_ut.y(),
           rep.true_field_ut.z());
    f.line("rank = {}\ncondition = {}\nresidual_norm_ut = {}", e.rank, e.condition, e.residual_norm_ut);
    f.line("std_x_ut = {}\nstd_y_ut = {}\nstd_z_ut = {}", std::sqrt(e.covariance(0, 0)), std::sqrt(e.covariance(1, 1)),
           std::sqrt(e.covariance(2, 2)));
    f.line("observations = {}", observations.size());
    f.line("\n[snr]");
    f.line("s_ut = {}\nd_before_ut = {}\nd_after_ut = {}", rep.s_ut, rep.d_before_ut, rep.d_after_ut);
    f.line("snr_before = {}\nsnr_after = {}", rep.snr_before, rep.snr_after);
    f.line("reduction = {}\nrecovery_amplitude = {}\nrecovery_power = {}", rep.reduction, rep.recovery_amplitude,
           rep.recovery_power);
  }
  {
    Artifact f(out_dir, "disturbance_trace.csv", header);
    f.line("timestamp_us,cycle,rotation_deg,db_x_ut,db_y_ut,db_z_ut,corrected_x_ut,corrected_y_ut,corrected_z_ut");
    for (const auto& r : trace) f.line("{}", r);
  }
  return rep;
}

disturbance::SnrSweep run_snr_sweep(const config::ExperimentConfig& cfg, const std::filesystem::path& out_dir) {
  ensure_dir(out_dir);
  const auto& s = cfg.snr;
  std::vector<double> grid;
  const auto n = static_cast<int>(std::floor((s.dy_max_mm - s.dy_min_mm) / s.dy_step_mm + 1e-9));
  for (int i = 0; i <= n; ++i) grid.push_back(s.dy_min_mm + i * s.dy_step_mm);
  const auto magnets = sensor::calibrated_magnet_set(cfg.unit.sa2.layer.thickness_mm);
  disturbance::SnrSweep sweep = disturbance::adjacent_snr_sweep(magnets, grid, cfg.unit.sa2.layer.thickness_mm);
  if (out_dir.empty()) return sweep;

  const std::string header = cfg.header("snr-sweep");
  {
    Artifact f(out_dir, "snr_sweep.csv", header);
    f.line("magnet_id,dy_mm,s_ut,d_ut,snr");
    for (const auto& r : sweep.rows) f.line("{},{},{},{},{}", r.magnet_id, r.dy_mm, r.s_ut, r.d_ut, r.snr);
  }
  {
    Artifact f(out_dir, "snr_argmax.csv", header);
    f.line("dy_mm,argmax_magnet");
    for (std::size_t i = 0; i < sweep.dy_grid_mm.size(); ++i)
      f.line("{},{}", sweep.dy_grid_mm[i], sweep.argmax_magnet[i]);
  }
  return sweep;
}

GraspReport run_grasp(const config::ExperimentConfig& cfg, const std::filesystem::path& out_dir) {
  ensure_dir(out_dir);
  GraspReport rep;
  const grasp::GraspScenario sc = config::grasp_scenario(cfg);
  rep.result = grasp::run_grasp(sc);
  if (sc.object.kind == grasp::ObjectKind::Tweezers &&
      std::holds_alternative<grasp::Hysteresis>(sc.policy.mode)) {
    rep.linearity = grasp::tweezers_linearity_study(sc, cfg.grasp.sizes_mm);
    rep.has_linearity = true;
  }
  if (out_dir.empty()) return rep;

  const std::string header = cfg.header("grasp");
  {
    Artifact f(out_dir, "grasp_events.csv", header);
    f.line("{}", grasp::event_log_header());
    for (const auto& row : rep.result.trace) f.line("{}", grasp::to_csv_row(row));
  }
  {
    const auto& r = rep.result;
    Artifact f(out_dir, "grasp_summary.txt", header);
    f.line("[grasp]");
    f.line("final_phase = {}", grasp::to_string(r.final_phase));
    f.line("hold_start_tick = {}\nrelease_start_tick = {}\ndone_tick = {}", r.hold_start_tick, r.release_start_tick,
           r.done_tick);
    f.line("mechanical_limit = {}", r.mechanical_limit);
    f.line("hold_opening_mm = {}\nmax_force_n = {}\nfinal_force_n = {}", r.hold_opening_mm, r.max_force_n,
           r.final_force_n);
    for (std::size_t i = 0; i < r.final_g.size(); ++i)
      f.line("finger{}_g = {}\nfinger{}_motor_deg = {}\nfinger{}_signal_quantum = {}", i, r.final_g[i], i,
             r.final_motor_deg[i], i, r.signal_quantum[i]);
    if (rep.has_linearity) {
      f.line("\n[linearity]");
      f.line("slope = {}\nintercept_mm = {}\nr_squared = {}", rep.linearity.slope, rep.linearity.intercept,
             rep.linearity.r_squared);
    }
  }
  if (rep.has_linearity) {
    Artifact f(out_dir, "tweezers_linearity.csv", header);
    f.line("size_mm,gap_mm");
    for (std::size_t i = 0; i < rep.linearity.sizes_mm.size(); ++i)
      f.line("{},{}", rep.linearity.sizes_mm[i], rep.linearity.gaps_mm[i]);
  }
  return rep;
}

namespace {

std::string relative_csv_row(const pipeline::RelativeFrame& f) {
  std::string row = fmt::format("{},{}", f.timestamp_us, static_cast<int>(f.finger_id));
  for (int r = 0; r < kTaxelRows; ++r)
    for (int c = 0; c < kTaxelCols; ++c) row += fmt::format(",{}", f.fa1(r, c));
  for (int i = 0; i < 3; ++i) row += fmt::format(",{}", f.sa2_ut[i]);
  return row;
}

}  // namespace

StreamReport run_stream(const config::ExperimentConfig& cfg, const std::filesystem::path& out_dir) {
  ensure_dir(out_dir);
  const auto& st = cfg.stream;
  const auto ticks = static_cast<int>(std::lround(cfg.stream_run.duration_s * st.rate_hz));
  StreamReport rep;
  rep.timestamps = ticks;

  std::vector<sensor::SensorUnit> units;
  std::vector<pipeline::StreamProcessor> procs;
  sensor::UnitConfig ucfg = cfg.unit;
  ucfg.env.seed = derive_seed(cfg.seed, 0x57);
  for (int i = 0; i < st.fingers; ++i) {
    units.emplace_back(ucfg, static_cast<std::uint8_t>(i));
    procs.emplace_back(st);
  }
  // One half-sine press of 1 s per finger after initialization, staggered by 0.25 s.
  auto force_at = [&](int tick, int finger) {
    const double t = static_cast<double>(tick - st.init_samples - finger * st.rate_hz / 4) / st.rate_hz;
    return (t > 0.0 && t < 1.0) ? cfg.stream_run.press_force_n * std::sin(M_PI * t) : 0.0;
  };
  for (int tick = 0; tick < ticks; ++tick) {
    for (int i = 0; i < st.fingers; ++i) {
      sensor::ContactStimulus stim;
      stim.force_n = {0.0, 0.0, force_at(tick, i)};
      const auto frame = units[static_cast<std::size_t>(i)].sample(stim, tick * st.period_us());
      rep.frames.push_back(frame);
      if (auto rel = procs[static_cast<std::size_t>(i)].feed(frame)) rep.processed.push_back(*rel);
    }
  }
  if (out_dir.empty()) return rep;

  const std::string header = cfg.header("stream");
  {
    pipeline::FrameLogWriter log(out_dir / "stream_frames.csv", {header});
    for (const auto& f : rep.frames) log.write(f);
  }
  {
    Artifact f(out_dir, "stream_processed.csv", header);
    f.line("{}", pipeline::frame_csv_header());
    for (const auto& r : rep.processed) f.line("{}", relative_csv_row(r));
  }
  if (cfg.stream_run.binary) {
    const auto bytes = pipeline::encode_stream(rep.frames);
    std::ofstream bin(out_dir / "stream_frames.bin", std::ios::binary);
    bin.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  }
  return rep;
}

}  // namespace tacsim::experiments
