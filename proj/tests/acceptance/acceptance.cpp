// Runs every acceptance criterion against the frozen default configuration and
// prints one PASS/FAIL line per criterion. Exit status is the failure count.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <fmt/core.h>

#include "tacsim/disturbance.hpp"
#include "tacsim/errors.hpp"
#include "tacsim/estimation.hpp"
#include "tacsim/experiments.hpp"
#include "tacsim/frame_codec.hpp"
#include "tacsim/gripper_sim.hpp"
#include "tacsim/sensor_unit.hpp"
#include "tacsim/signal_pipeline.hpp"
#include "oracles.hpp"

using namespace tacsim;

namespace {

// Tolerances.
constexpr double kNoiseFreeLocationMm = 0.05;
constexpr double kNoisyLocationMm = 1.0;
constexpr double kRuntimeS = 10.0;
constexpr double kRoundTripRel = 1e-6;
constexpr double kForceRmseN = 0.32;
constexpr double kTorqueCrossAbs = 1e-12;
constexpr double kTorqueRmseNmm = 0.5;
constexpr double kEarthFieldRel = 1e-9;
constexpr double kReductionTarget = 0.053;
constexpr double kReductionBand = 0.015;
constexpr double kRecoveryMin = 0.698 - 0.10;
constexpr double kSnr16Min = 0.93 - 0.02;
constexpr double kNoiseRatioBand = 0.10;
constexpr double kHysteresisGapFraction = 0.02;
constexpr double kDeadZoneMm = 0.2;
constexpr double kLinearityR2 = 0.99;

struct Check {
  bool ok = true;
  std::string detail;
  void require(bool cond, const std::string& what) {
    if (!cond) ok = false;
    if (!detail.empty()) detail += "; ";
    detail += what + (cond ? "" : " [x]");
  }
};

config::ExperimentConfig noise_free(std::uint64_t seed = 1) {
  return config::make_config({{"noise.fa1_sigma_counts", "0"}, {"noise.sa2_sigma_ut", "0"}, {"noise.hall_lsb_ut", "0"}},
                             seed);
}

int cfg_fingers() { return config::make_config({}).stream.fingers; }

Vec3 random_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> g(0, 1);
  return Vec3(g(rng), g(rng), g(rng)).normalized();
}

Check location() {
  Check c;
  const auto nf = experiments::run_characterize(noise_free(), {});
  double worst_nf = 0;
  for (const auto& l : nf.locations) worst_nf = std::max(worst_nf, l.location_rmse_mm);
  c.require(worst_nf <= kNoiseFreeLocationMm, fmt::format("noise-free worst {:.4f} mm", worst_nf));

  const auto t0 = std::chrono::steady_clock::now();
  const auto noisy = experiments::run_characterize(config::make_config({}, 1), {});
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::string per;
  bool all = true;
  for (const auto& l : noisy.locations) {
    per += fmt::format("{}={:.3f} ", l.label, l.location_rmse_mm);
    all = all && l.location_rmse_mm <= kNoisyLocationMm;
  }
  c.require(all, "noisy " + per + "mm");
  c.require(secs < kRuntimeS, fmt::format("runtime {:.3f} s", secs));
  return c;
}

Check force() {
  Check c;
  // Synthetic data with F = k * signal + b exactly.
  const Vec3 k(0.0024, -0.0031, 0.00066);
  const Vec3 b(0.013, -0.002, 0.031);
  std::vector<estimation::CharacterizationSweep> sweeps(1);
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u(-300, 300);
  for (int i = 0; i < 45; ++i) {
    estimation::SweepSample s;
    s.frame.sa2_ut = Vec3(u(rng), u(rng), u(rng));
    s.frame.fa1.setConstant((3000 + 10 * u(rng)) / 16);
    s.force_n = k.cwiseProduct(Vec3(s.frame.sa2_ut.x(), s.frame.sa2_ut.y(), s.frame.fa1_sum())) + b;
    sweeps[0].samples.push_back(s);
  }
  const auto p = estimation::fit_calibration(sweeps, 0.0, estimation::ZScaling::None);
  double worst = 0;
  for (int i = 0; i < 3; ++i) {
    worst = std::max(worst, std::abs(p.k[i] - k[i]) / std::abs(k[i]));
    worst = std::max(worst, std::abs(p.b[i] - b[i]) / std::abs(b[i]));
  }
  c.require(worst <= kRoundTripRel, fmt::format("round-trip rel err {:.2e}", worst));

  const auto rep = experiments::run_characterize(config::make_config({}, 1), {});
  std::string per;
  bool all = true;
  for (const auto& l : rep.locations) {
    per += fmt::format("{}={:.3f} ", l.label, l.force_rmse_n);
    all = all && l.force_rmse_n <= kForceRmseN;
  }
  c.require(all, "tri-axis RMSE " + per + "N");
  return c;
}

Check a_selection() {
  Check c;
  const auto cfg = config::make_config({}, 1);
  auto sweeps = experiments::simulate_sweeps(cfg, cfg.seed);
  const double a_default = estimation::select_a(sweeps).a;
  c.require(a_default == 0.0, fmt::format("default a* = {}", a_default));
  for (auto& s : sweeps) {
    for (auto& smp : s.samples) {
      const double hall = smp.frame.sa2_ut.z();
      smp.frame.sa2_ut.z() = smp.frame.fa1_sum();
      smp.frame.fa1.setConstant(hall / 16.0);
    }
  }
  const double a_swapped = estimation::select_a(sweeps).a;
  c.require(a_swapped == 1.0, fmt::format("swapped a* = {}", a_swapped));
  return c;
}

Check torque() {
  Check c;
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(-20, 20);
  double worst = 0;
  for (int i = 0; i < 10000; ++i) {
    const Vec2 loc(u(rng), u(rng));
    const Vec3 f(u(rng) / 5, u(rng) / 5, u(rng) / 5);
    const Vec3 r = Vec3(loc.x(), loc.y(), 0) - estimation::kDefaultJointCenterMm;
    worst = std::max(worst, (estimation::estimate_torque(loc, f) - oracle::cross(r, f)).cwiseAbs().maxCoeff());
  }
  c.require(worst <= kTorqueCrossAbs, fmt::format("cross-product max err {:.1e} N*mm", worst));
  const auto rep = experiments::run_characterize(config::make_config({}, 1), {});
  c.require(rep.torque_rmse_nmm <= kTorqueRmseNmm, fmt::format("pipeline RMSE {:.3f} N*mm", rep.torque_rmse_nmm));
  return c;
}

Check earth_field() {
  Check c;
  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> ang(0.2, 3.0);
  std::uniform_real_distribution<double> mag(-60, 60);
  double worst = 0;
  for (int i = 0; i < 100; ++i) {
    const Vec3 be(mag(rng), mag(rng), mag(rng));
    std::vector<disturbance::RotationObservation> obs;
    for (int k = 0; k < 2 + i % 4; ++k) {
      const Mat3 m = oracle::rodrigues(random_unit(rng), ang(rng));
      obs.push_back({m, (m - Mat3::Identity()) * be});
    }
    worst = std::max(worst, (disturbance::estimate_earth_field(obs).field_ut - be).norm() / be.norm());
  }
  c.require(worst <= kEarthFieldRel, fmt::format("100 instances max rel err {:.1e}", worst));

  int raised = 0;
  const int families = 200;
  for (int i = 0; i < families; ++i) {
    const Vec3 axis = random_unit(rng);
    std::vector<disturbance::RotationObservation> obs;
    for (int k = 0; k < 1 + i % 5; ++k) {
      const Mat3 m = oracle::rodrigues(axis, ang(rng));
      obs.push_back({m, (m - Mat3::Identity()) * Vec3(10, -5, 40)});
    }
    try {
      disturbance::estimate_earth_field(obs);
    } catch (const RankDeficient& e) {
      if (std::abs(e.unobservable_axis().dot(axis)) > 1 - 1e-9) ++raised;
    }
  }
  c.require(raised == families, fmt::format("RankDeficient with correct axis {}/{}", raised, families));
  return c;
}

Check cancellation() {
  Check c;
  const auto rep = experiments::run_disturbance(config::make_config({}, 1), {});
  c.require(std::abs(rep.reduction - kReductionTarget) <= kReductionBand,
            fmt::format("SNR reduction {:.2f}%", 100 * rep.reduction));
  c.require(rep.recovery_amplitude >= kRecoveryMin,
            fmt::format("recovered {:.1f}% of the loss", 100 * rep.recovery_amplitude));
  return c;
}

Check snr_sweep() {
  Check c;
  const auto sweep = experiments::run_snr_sweep(config::make_config({}, 1), {});
  const auto& grid = sweep.dy_grid_mm;
  bool argmax = true;
  double snr16 = 0;
  for (std::size_t j = 0; j < grid.size(); ++j) {
    if (grid[j] >= 16.0) argmax = argmax && sweep.argmax_magnet[j] == 2;
    if (grid[j] == 16.0) snr16 = sweep.rows[grid.size() + j].snr;
  }
  bool monotone = true;
  for (std::size_t i = 1; i < sweep.rows.size(); ++i)
    if (sweep.rows[i].magnet_id == sweep.rows[i - 1].magnet_id) monotone = monotone && sweep.rows[i].snr > sweep.rows[i - 1].snr;
  c.require(argmax, "magnet #2 argmax for dy >= 16 mm");
  c.require(snr16 >= kSnr16Min, fmt::format("SNR2(16 mm) = {:.4f}", snr16));
  c.require(monotone, "strictly increasing in dy");
  return c;
}

Check pipeline_algebra() {
  Check c;
  pipeline::StreamConfig sc;
  pipeline::StreamProcessor proc(sc);
  pipeline::TactileFrame f;
  f.fa1.setConstant(317);
  f.sa2_ut = {12.5, -3.25, 587.75};
  bool exact = true;
  for (int i = 0; i < 1000; ++i) {
    f.timestamp_us = i * sc.period_us();
    if (auto r = proc.feed(f)) exact = exact && r->fa1.isZero(0.0) && r->sa2_ut.isZero(0.0);
  }
  pipeline::MovingAverage<double> dc(6);
  for (int i = 0; i < 100; ++i) exact = exact && dc.push(0.1 * 3) == 0.1 * 3;
  c.require(exact, "constant input exact");

  std::mt19937_64 rng(44);
  std::normal_distribution<double> g(0, 2.0);
  pipeline::MovingAverage<double> ma(6);
  for (int i = 0; i < 10; ++i) ma.push(g(rng));
  double s2 = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double y = ma.push(g(rng));
    s2 += y * y;
  }
  const double ratio = 2.0 / std::sqrt(s2 / n);
  c.require(std::abs(ratio - std::sqrt(6.0)) <= kNoiseRatioBand * std::sqrt(6.0),
            fmt::format("sigma reduction {:.3f} over {} samples", ratio, n));

  std::uniform_int_distribution<int> cnt(0, 1023);
  std::normal_distribution<float> fl(0, 500);
  bool codec = true;
  for (int i = 0; i < 10000; ++i) {
    pipeline::TactileFrame t;
    t.timestamp_us = static_cast<std::int64_t>(rng());
    t.finger_id = static_cast<std::uint8_t>(rng());
    for (int k = 0; k < 16; ++k) t.fa1(k / 4, k % 4) = cnt(rng);
    t.sa2_ut = Vec3(fl(rng), fl(rng), fl(rng));
    codec = codec && pipeline::decode(pipeline::encode(t)) == t;
  }
  c.require(codec, "codec identity over 1e4 frames");

  const auto st = experiments::run_stream(config::make_config({{"stream.duration_s", "1"}}, 1), {});
  const std::size_t channels = static_cast<std::size_t>(cfg_fingers()) * kChannelsPerFinger;
  c.require(st.timestamps == 250 && st.frames.size() == 500 && channels == 38,
            fmt::format("1 s stream {} x {} fingers x {} channels", st.timestamps,
                        st.frames.size() / std::max(1, st.timestamps), kChannelsPerFinger));
  return c;
}

Check grasp_controller() {
  Check c;
  const auto egg = experiments::run_grasp(config::make_config({}, 1), {}).result;
  bool within = egg.final_phase == grasp::Phase::Holding && egg.hold_g.size() == 2;
  std::string over;
  for (std::size_t f = 0; f < egg.hold_g.size(); ++f) {
    within = within && egg.hold_g[f] > 700.0 && egg.hold_g[f] - 700.0 <= egg.signal_quantum[f];
    over += fmt::format("{:.0f}/{:.0f} ", egg.hold_g[f] - 700.0, egg.signal_quantum[f]);
  }
  c.require(within, "egg holds, overshoot/quantum " + over);

  const auto tcfg = config::make_config({{"grasp.object", "tweezers"}}, 1);
  const auto tw = experiments::run_grasp(tcfg, {});
  const auto& r = tw.result;
  const std::int64_t hold = r.release_start_tick - r.hold_start_tick;
  const bool sequence = r.hold_start_tick > 0 && r.release_start_tick > r.hold_start_tick &&
                        r.done_tick > r.release_start_tick && r.final_phase == grasp::Phase::Done;
  c.require(sequence && std::abs(hold - 500) <= 1, fmt::format("tweezers close/hold {} ticks/release", hold));
  c.require(tw.has_linearity && tw.linearity.r_squared >= kLinearityR2 && tw.linearity.sizes_mm.size() >= 5,
            fmt::format("linearity R2 {:.4f} over {} sizes", tw.linearity.r_squared, tw.linearity.sizes_mm.size()));

  bool same = true;
  for (int i = 0; i < 3; ++i) {
    const auto again = experiments::run_grasp(tcfg, {}).result;
    same = same && again.trace.size() == r.trace.size();
    for (std::size_t k = 0; same && k < r.trace.size(); ++k)
      same = grasp::to_csv_row(again.trace[k]) == grasp::to_csv_row(r.trace[k]);
  }
  c.require(same, "3 repeated runs identical");
  return c;
}

// Triangle press/release over the characterization force range, noise-free.
Check hysteresis() {
  Check c;
  const auto cfg = config::make_config({}, 1);
  sensor::UnitConfig ucfg = cfg.unit;
  ucfg.env.noise = {0.0, 0.0, 0.0};
  sensor::SensorUnit unit(ucfg, 0);
  const double compliance = sensor::compliance_mm_per_n(ucfg.sa2.layer, ucfg.sa2.bone_area_mm2);
  const double max_n = cfg.characterize.max_force_n;
  const int steps = 400;
  const double rest = unit.sample({}, 0).sa2_ut.z();
  std::vector<double> up(steps + 1), down(steps + 1);
  auto read = [&](int i) {
    sensor::ContactStimulus s;
    s.force_n = {0, 0, max_n * i / steps};
    return std::abs(unit.sample(s, 0).sa2_ut.z() - rest);
  };
  for (int i = 0; i <= steps; ++i) up[i] = read(i);
  for (int i = steps; i >= 0; --i) down[i] = read(i);
  const double full = up[steps];
  double gap = 0;
  for (int i = 0; i <= steps; ++i) gap = std::max(gap, std::abs(down[i] - up[i]));
  c.require(gap <= kHysteresisGapFraction * full, fmt::format("max loop gap {:.2f}% of full scale", 100 * gap / full));

  // Mean slope over the first half of the dead zone against the slope just beyond it,
  // and no comparable flat stretch later in the stroke.
  const int k = static_cast<int>(std::lround(kDeadZoneMm / (max_n * compliance) * steps));
  const double early = (up[k / 2] - up[0]) / (k / 2);
  const double later = (up[2 * k] - up[k]) / k;
  bool linear_after = true;
  for (int i = k; i + k <= steps; i += k / 2) linear_after = linear_after && (up[i + k] - up[i]) / k > 0.8 * later;
  c.require(early < 0.5 * later && linear_after,
            fmt::format("slope ratio {:.2f} inside the first {} mm", early / later, kDeadZoneMm));
  return c;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Check()>>> criteria{
      {"location estimation", location},      {"force estimation", force},
      {"a-selection", a_selection},           {"torque", torque},
      {"earth-field estimator", earth_field}, {"disturbance cancellation", cancellation},
      {"SNR sweep", snr_sweep},               {"pipeline algebra", pipeline_algebra},
      {"grasp controller", grasp_controller},            {"hysteresis model", hysteresis},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Check c;
    try {
      c = criteria[i].second();
    } catch (const std::exception& e) {
      c.ok = false;
      c.detail = std::string("exception: ") + e.what();
    }
    failures += c.ok ? 0 : 1;
    fmt::print("{} {:2d} {}: {}\n", c.ok ? "PASS" : "FAIL", i + 1, criteria[i].first, c.detail);
  }
  fmt::print("{}/{} criteria passed\n", criteria.size() - static_cast<std::size_t>(failures), criteria.size());
  return failures == 0 ? 0 : 1;
}
