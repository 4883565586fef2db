#pragma once

#include <cstdint>
#include <random>

namespace actgrad {

/**
 * Deterministic random stream. mt19937_64 output is fully specified by the
 * standard and the uniform conversion below avoids std::uniform_real_distribution,
 * so a (seed, call sequence) pair reproduces bit-identical draws everywhere.
 */
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  /// Uniform double in [0, 1) with 53 random mantissa bits.
  double next_uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * next_uniform(); }

  /// Uniform integer in [0, n).
  std::uint64_t next_below(std::uint64_t n) {
    return static_cast<std::uint64_t>(next_uniform() * static_cast<double>(n)) % n;
  }

  std::uint64_t next_u64() { return gen_(); }

 private:
  std::mt19937_64 gen_;
};

}  // namespace actgrad
