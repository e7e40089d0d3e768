#pragma once

#include <cstdint>

namespace spaql {

// SplitMix64 (Steele/Lea/Burlow finalizer). Chosen over std::mt19937 because
// runs fan out into one stream per agent and we want cheap, well-separated
// substreams keyed by seed arithmetic plus a split() that derives an
// independent generator without coupling the parent's sequence.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1) with 53 random bits.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

  // Uniform integer in [0, n). n must be positive.
  int uniform_int(int n) {
    int k = static_cast<int>(next_double() * static_cast<double>(n));
    return k < n ? k : n - 1;  // guard the (impossible in exact math) n case
  }

  // Derive an independent generator; advances this one by one draw.
  Rng split() { return Rng(next_u64()); }

 private:
  std::uint64_t state_;
};

}  // namespace spaql
