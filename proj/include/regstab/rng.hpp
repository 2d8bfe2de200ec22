#pragma once

#include <cstdint>
#include <random>

namespace regstab {

/// SplitMix64 output finalizer.
constexpr std::uint64_t splitmix64_mix(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline constexpr std::uint64_t kGoldenGamma = 0x9e3779b97f4a7c15ULL;

/// Identifies one independent random stream: the replicate stream is a pure
/// function of (base_seed, replicate_index).
struct SeedSpec {
  std::uint64_t base_seed = 0;
  std::uint64_t replicate_index = 0;

  /// Seed of the replicate stream. The derivation is part of the
  /// reproducibility contract and must never change.
  constexpr std::uint64_t replicate_seed() const noexcept {
    return splitmix64_mix(base_seed ^ (kGoldenGamma * (replicate_index + 1)));
  }
};

/// Random stream for one replicate. std::mt19937_64 has a fully specified
/// output sequence, and all distributions used on top of it are implemented
/// here, so draws are identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  explicit Rng(const SeedSpec& seed) : engine_(seed.replicate_seed()) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform on (0, 1).
  double uniform_open() {
    double u;
    do {
      u = uniform();
    } while (u == 0.0);
    return u;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);

  /// Standard normal via the polar Box-Muller method.
  double normal();

  /// Poisson(mean): inversion below mean 10, PTRD rejection (Hoermann 1993)
  /// at and above.
  std::uint64_t poisson(double mean);

 private:
  std::mt19937_64 engine_;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace regstab
