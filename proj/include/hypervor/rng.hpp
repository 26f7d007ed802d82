#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <random>

namespace hypervor {

// Seeded generator with platform-independent derived distributions.
// std::mt19937_64's raw output is fully specified by the standard; the
// standard distributions are not, so they are avoided here.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t r;
    do {
      r = engine_();
    } while (r >= limit);
    return r % n;
  }

  // Uniform direction on the unit 2-sphere (rejection from the cube).
  std::array<double, 3> direction() {
    for (;;) {
      const double x = uniform(-1, 1), y = uniform(-1, 1), z = uniform(-1, 1);
      const double n2 = x * x + y * y + z * z;
      if (n2 > 1e-6 && n2 <= 1.0) {
        const double n = std::sqrt(n2);
        return {x / n, y / n, z / n};
      }
    }
  }

 private:
  std::mt19937_64 engine_;
};

// Mixes a base seed with a stream index so sub-stages draw independent
// sequences from a single scene seed.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace hypervor
