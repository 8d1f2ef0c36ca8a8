// tacsim: run the simulated experiments and write their CSV artifacts.
//
//   tacsim <characterize|calibrate|disturbance|snr-sweep|grasp|stream>
//        [--config PATH] [--out DIR] [--seed N] [--set key=value]...
//
// Exit status: 0 success, 2 configuration error, 1 runtime error.

#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "tacsim/errors.hpp"
#include "tacsim/experiments.hpp"

namespace {

struct Options {
  std::string config;
  std::string out = "out";
  std::optional<std::uint64_t> seed;
  std::vector<std::string> overrides;
};

using Runner = std::function<void(const tacsim::config::ExperimentConfig&, const std::filesystem::path&)>;

void characterize(const tacsim::config::ExperimentConfig& cfg, const std::filesystem::path& out) {
  const auto rep = tacsim::experiments::run_characterize(cfg, out);
  fmt::print("a = {}\n", rep.params.a);
  fmt::print("{:<4} {:>14} {:>12} {:>16}\n", "loc", "location_mm", "force_n", "torque_nmm");
  for (const auto& l : rep.locations)
    fmt::print("{:<4} {:>14.4f} {:>12.4f} {:>16.4f}\n", l.label, l.location_rmse_mm, l.force_rmse_n, l.torque_rmse_nmm);
  fmt::print("pooled torque RMSE {:.4f} N*mm\n", rep.torque_rmse_nmm);
}

void calibrate(const tacsim::config::ExperimentConfig& cfg, const std::filesystem::path& out) {
  const auto p = tacsim::experiments::run_calibrate(cfg, out);
  fmt::print("a = {}\nk = ({}, {}, {})\nb = ({}, {}, {})\n", p.a, p.k.x(), p.k.y(), p.k.z(), p.b.x(), p.b.y(), p.b.z());
  fmt::print("R2 = ({:.6f}, {:.6f}, {:.6f})\n", p.diagnostics.r_squared.x(), p.diagnostics.r_squared.y(),
             p.diagnostics.r_squared.z());
}

void disturbance(const tacsim::config::ExperimentConfig& cfg, const std::filesystem::path& out) {
  const auto r = tacsim::experiments::run_disturbance(cfg, out);
  const auto& b = r.estimate.field_ut;
  fmt::print("B_e estimate ({:.3f}, {:.3f}, {:.3f}) uT, rank {}, condition {:.3f}\n", b.x(), b.y(), b.z(),
             r.estimate.rank, r.estimate.condition);
  fmt::print("SNR before {:.4f} (reduction {:.2f}%), after {:.4f}, recovered {:.1f}% of the loss\n", r.snr_before,
             100.0 * r.reduction, r.snr_after, 100.0 * r.recovery_amplitude);
}

void snr_sweep(const tacsim::config::ExperimentConfig& cfg, const std::filesystem::path& out) {
  const auto s = tacsim::experiments::run_snr_sweep(cfg, out);
  for (std::size_t i = 0; i < s.dy_grid_mm.size(); ++i)
    fmt::print("dy {:>5.1f} mm  best magnet #{}\n", s.dy_grid_mm[i], s.argmax_magnet[i]);
}

void grasp(const tacsim::config::ExperimentConfig& cfg, const std::filesystem::path& out) {
  const auto rep = tacsim::experiments::run_grasp(cfg, out);
  const auto& r = rep.result;
  fmt::print("final phase {}, hold start tick {}, release tick {}, done tick {}\n", tacsim::grasp::to_string(r.final_phase),
             r.hold_start_tick, r.release_start_tick, r.done_tick);
  for (std::size_t i = 0; i < r.final_g.size(); ++i)
    fmt::print("finger {}: motor {} deg, g {:.1f}\n", i, r.final_motor_deg[i], r.final_g[i]);
  if (rep.has_linearity)
    fmt::print("tweezers linearity: slope {:.4f}, R2 {:.5f}\n", rep.linearity.slope, rep.linearity.r_squared);
}

void stream(const tacsim::config::ExperimentConfig& cfg, const std::filesystem::path& out) {
  const auto rep = tacsim::experiments::run_stream(cfg, out);
  fmt::print("{} timestamps, {} raw frames, {} processed frames\n", rep.timestamps, rep.frames.size(),
             rep.processed.size());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulated two-layer tactile sensor experiments"};
  app.require_subcommand(1);

  Options opt;
  const std::map<std::string, std::pair<std::string, Runner>> commands{
      {"characterize", {"L1-L5 press sweeps and location/force/torque RMSE", characterize}},
      {"calibrate", {"fit the force calibration and write calibration.ini", calibrate}},
      {"disturbance", {"earth-field estimation and cancellation under rotation", disturbance}},
      {"snr-sweep", {"SNR of the four magnets against a neighbour at dy", snr_sweep}},
      {"grasp", {"force-closed grasp simulation", grasp}},
      {"stream", {"two-finger 250 Hz stream with frame logs", stream}},
  };
  for (const auto& [name, entry] : commands) {
    CLI::App* sub = app.add_subcommand(name, entry.first);
    sub->add_option("--config", opt.config, "key-value config file")->check(CLI::ExistingFile);
    sub->add_option("--out", opt.out, "output directory")->capture_default_str();
    sub->add_option("--seed", opt.seed, "run seed (overrides run.seed)");
    sub->add_option("--set", opt.overrides, "override, section.key=value (repeatable)")->take_all();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    CLI::App* sub = app.get_subcommands().front();
    const auto cfg = tacsim::config::load_config(opt.config, opt.overrides, opt.seed);
    commands.at(sub->get_name()).second(cfg, opt.out);
    return 0;
  } catch (const tacsim::ConfigError& e) {
    fmt::print(stderr, "tacsim: {}\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    fmt::print(stderr, "tacsim: {}\n", e.what());
    return 1;
  }
}
