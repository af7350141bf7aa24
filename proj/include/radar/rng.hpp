#ifndef RADAR_RNG_HPP
#define RADAR_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>

namespace radar {

// All randomness in the library flows through this wrapper. The engine is
// std::mt19937_64 (bit-exact per the standard) and every distribution
// transform is written out here rather than taken from <random>, whose
// distributions are implementation-defined. Streams are therefore fully
// reproducible from a seed.

inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Deterministic sub-stream seeds: master seed scrambled with a tag chain.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t tag_a,
                                 std::uint64_t tag_b = 0) {
  std::uint64_t s = master ^ 0x6a09e667f3bcc908ULL;
  splitmix64(s);
  s ^= tag_a * 0x9e3779b97f4a7c15ULL;
  splitmix64(s);
  s ^= tag_b * 0xc2b2ae3d27d4eb4fULL;
  return splitmix64(s);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // [0, 1)
  double uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) {
    return lo + (hi - lo) * uniform01();
  }

  // Box-Muller (cosine branch only, no cached partner): one normal costs
  // two uniforms and replay never depends on call parity.
  double normal() {
    const double u1 =
        (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;  // (0, 1]
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * 3.14159265358979323846 * u2);
  }

  // Uniform index in [0, n).
  std::size_t uniform_index(std::size_t n) {
    return static_cast<std::size_t>(uniform01() * static_cast<double>(n));
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace radar

#endif
