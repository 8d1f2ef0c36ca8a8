#include <benchmark/benchmark.h>

#include <random>

#include "tacsim/disturbance.hpp"
#include "tacsim/frame_codec.hpp"
#include "tacsim/sensor_model.hpp"
#include "tacsim/sensor_unit.hpp"
#include "tacsim/signal_pipeline.hpp"

using namespace tacsim;

static void BM_DipoleFlux(benchmark::State& state) {
  const auto m = sensor::calibrated_magnet(2);
  double x = 0.0;
  for (auto _ : state) {
    x += 1e-6;
    benchmark::DoNotOptimize(sensor::dipole_flux(m, Vec3(x, 0.3, -3.5)));
  }
}
BENCHMARK(BM_DipoleFlux);

static void BM_SensorSample(benchmark::State& state) {
  sensor::SensorUnit unit(sensor::default_unit_config(), 0);
  sensor::ContactStimulus s;
  s.force_n = {0.2, 0.1, 1.0};
  std::int64_t t = 0;
  for (auto _ : state) benchmark::DoNotOptimize(unit.sample(s, t += 4000));
}
BENCHMARK(BM_SensorSample);

static void BM_PipelineFeed(benchmark::State& state) {
  pipeline::StreamProcessor proc;
  pipeline::TactileFrame f;
  f.fa1.setConstant(100);
  f.sa2_ut = {1, 2, 580};
  for (auto _ : state) {
    f.timestamp_us += 4000;
    benchmark::DoNotOptimize(proc.feed(f));
  }
}
BENCHMARK(BM_PipelineFeed);

static void BM_EarthFieldSolve(benchmark::State& state) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g(0, 1);
  const Vec3 be(0, 32, 38);
  std::vector<disturbance::RotationObservation> obs;
  for (int i = 0; i < state.range(0); ++i) {
    const Mat3 m = Eigen::AngleAxisd(1.0, Vec3(g(rng), g(rng), g(rng)).normalized()).toRotationMatrix();
    obs.push_back({m, (m - Mat3::Identity()) * be});
  }
  for (auto _ : state) benchmark::DoNotOptimize(disturbance::estimate_earth_field(obs));
}
BENCHMARK(BM_EarthFieldSolve)->Arg(3)->Arg(30);

static void BM_CodecRoundTrip(benchmark::State& state) {
  pipeline::TactileFrame f;
  f.fa1.setConstant(512);
  f.sa2_ut = {1.5, -2.25, 580.0};
  for (auto _ : state) benchmark::DoNotOptimize(pipeline::decode(pipeline::encode(f)));
}
BENCHMARK(BM_CodecRoundTrip);
BENCHMARK_MAIN();
