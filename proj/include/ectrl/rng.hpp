#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace ectrl {

// splitmix64 step (Vigna, public domain reference implementation). Used both
// as a stand-alone mixer and to derive independent sub-seeds.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Deterministic sub-seed for a (master, a, b) triple; the Monte-Carlo harness
// uses (N, trial) so trials are reproducible and order-independent.
inline std::uint64_t mix_seed(std::uint64_t master, std::uint64_t a,
                              std::uint64_t b) {
  std::uint64_t s = master;
  std::uint64_t h = splitmix64(s);
  s = h ^ (a * 0x9e3779b97f4a7c15ULL);
  h = splitmix64(s);
  s = h ^ (b * 0xc2b2ae3d27d4eb4fULL);
  return splitmix64(s);
}

// Standard-normal sampler: mt19937_64 (algorithm fixed by the C++ standard)
// feeding a Box-Muller transform. std::normal_distribution is deliberately
// avoided; its output differs between standard library implementations.
class GaussianSampler {
 public:
  explicit GaussianSampler(std::uint64_t seed) : engine_(seed) {}

  double next() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    // u1 in (0,1] so log(u1) is finite; u2 in [0,1).
    const double u1 =
        (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace ectrl
