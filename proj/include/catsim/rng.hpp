#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace catsim {

// All randomness in the project flows from one master seed. Module-level
// generators are derived substreams addressed by a fixed label, so adding a
// consumer never perturbs the draws of another. The scheme is pinned so that
// results are reproducible across builds:
//
//   stream seed = splitmix64(master_seed XOR fnv1a64(label))
//   engine      = std::mt19937_64 (bit-exact per the C++ standard)
//   uniform     = top 53 bits of the next engine output, scaled to [0,1)
//   gaussian    = Box-Muller over two fresh uniforms
//
// std::uniform_real_distribution / std::normal_distribution are deliberately
// not used: their output sequences are implementation-defined.

inline std::uint64_t fnv1a64(std::string_view text) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Deterministic substream generator: (master seed, label) -> stream.
class Rng {
 public:
  Rng(std::uint64_t master_seed, std::string_view label)
      : engine_(splitmix64(master_seed ^ fnv1a64(label))) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform double in [0, 1), 53-bit resolution.
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform integer in [0, n) via modulo reduction (bias is irrelevant here;
  /// the fixed mapping is what matters for reproducibility).
  std::uint64_t uniform_below(std::uint64_t n) { return next_u64() % n; }

  /// Standard normal draw. Consumes exactly two engine outputs.
  double gaussian() {
    const double u1 = static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;  // (0, 1]
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace catsim
