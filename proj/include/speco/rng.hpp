#pragma once

#include <cmath>
#include <cstdint>

// Self-contained xoshiro256++ generator with splitmix64 seeding and a
// Box-Muller normal sampler. Hand-rolled instead of <random> because the
// distribution outputs must be bit-stable across standard library versions:
// the sweep's determinism contract promises byte-identical results for a
// given (config, seed).
namespace speco {

// splitmix64 finalizer; also the building block of the sweep seed schedule.
inline std::uint64_t mix64(std::uint64_t x) {
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Stable 64-bit mix of (base, a, b); run_sweep derives the per-unit seed as
// mix_seed(base_seed, cell_index, replication_index).
inline std::uint64_t mix_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b) {
  std::uint64_t h = mix64(base + 0x9E3779B97F4A7C15ull);
  h = mix64(h ^ (a + 0x9E3779B97F4A7C15ull));
  h = mix64(h ^ (b + 0xC2B2AE3D27D4EB4Full));
  return h;
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t s = seed;
    for (auto& word : s_) {
      s += 0x9E3779B97F4A7C15ull;
      word = mix64(s);
    }
    if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = 1;  // all-zero state is invalid
  }

  std::uint64_t next() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // Uniform on the open interval (0,1); never returns an endpoint, so it is
  // safe under log().
  double uniform01() { return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + (b - a) * uniform01(); }

  bool bernoulli(double prob) { return uniform01() < prob; }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double r = std::sqrt(-2.0 * std::log(uniform01()));
    const double t = 2.0 * 3.14159265358979323846 * uniform01();
    spare_ = r * std::sin(t);
    has_spare_ = true;
    return r * std::cos(t);
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  std::uint64_t s_[4];
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace speco
