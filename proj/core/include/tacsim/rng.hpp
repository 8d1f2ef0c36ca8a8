#pragma once

#include <cstdint>
#include <random>

namespace tacsim {

/// splitmix64 step; used to derive independent per-stream seeds from a run seed.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) noexcept;

/// Explicit RNG state. Every stochastic operation takes one of these by
/// reference; there is no global generator.
class NoiseSource {
 public:
  explicit NoiseSource(std::uint64_t seed) : engine_(seed) {}

  /// Zero-mean Gaussian draw. sigma == 0 returns 0 without advancing the engine.
  double gaussian(double sigma);
  double uniform(double lo, double hi);

 private:
  std::mt19937_64 engine_;
};

}  // namespace tacsim
