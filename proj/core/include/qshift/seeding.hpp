#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace qshift {

/// 64-bit FNV-1a. Used for stage-seed derivation and config hashes, so its
/// output is part of the reproducibility contract.
std::uint64_t fnv1a64(std::string_view bytes) noexcept;

std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Seed for a named pipeline stage: splitmix64(seed XOR fnv1a64(stage)).
std::uint64_t stage_seed(std::uint64_t seed, std::string_view stage) noexcept;

/// Seeded generator with platform-independent sampling. The standard
/// distributions are implementation-defined, so sampling is done here on
/// top of the raw mt19937_64 stream.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform integer in [0, n). n must be > 0.
  std::uint64_t uniform_index(std::uint64_t n);

  /// Uniform real in [0, 1) with 53 random bits.
  double uniform01();

 private:
  std::mt19937_64 engine_;
};

}  // namespace qshift
