#ifndef DIMSC_RNG_HPP
#define DIMSC_RNG_HPP

#include <cstdint>
#include <random>

namespace dimsc {

// splitmix64 finalizer. Seed-stream derivation uses this so parallel
// repetitions get independent, reproducible streams.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a,
                                 std::uint64_t b) {
  return mix64(base ^ mix64(a ^ mix64(b)));
}

/// Seeded mt19937_64 with explicit 53-bit uniform draws. The standard pins
/// the generator algorithm but not the distributions, so all conversions are
/// spelled out here and draws are identical across platforms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  // Uniform on [0, 1): top 53 bits of one generator output.
  double uniform01() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  // Uniform on (0, 1].
  double uniform01_open0() {
    return static_cast<double>((gen_() >> 11) + 1) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) {
    return lo + (hi - lo) * uniform01();
  }

  bool bernoulli(double p) { return uniform01() < p; }

  // Index in [0, n). Modulo bias is irrelevant for the restart picks this
  // backs, and keeping it branch-free keeps the draw count fixed.
  std::uint64_t below(std::uint64_t n) { return gen_() % n; }

 private:
  std::mt19937_64 gen_;
};

}  // namespace dimsc

#endif
