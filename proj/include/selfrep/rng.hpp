// Seeded random source. All stochastic code in the library draws through this
// class so that a run is fully determined by its master seed. Sub-streams are
// derived by hashing a text label together with the parent seed, which keeps
// parallel work order-independent.

#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace selfrep {

// FNV-1a over the label, mixed into the seed with splitmix64 finalization.
inline std::uint64_t derive_seed(std::uint64_t seed, std::string_view label,
                                 std::uint64_t index = 0) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : label) {
    h ^= c;
    h *= 1099511628211ull;
  }
  std::uint64_t z = seed ^ h ^ (index * 0x9e3779b97f4a7c15ull);
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  // Uniform in [0, 1). 53 mantissa bits, independent of any library
  // distribution so the stream is identical on every platform.
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  // Exp(1) by inversion; the argument of log is in (0, 1].
  double exponential() { return -std::log(1.0 - uniform()); }

  // N(0,1) via Box-Muller. Consumes exactly two uniforms per call.
  double normal() {
    double u1 = 1.0 - uniform();
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }

  // Uniform integer in [0, n).
  std::size_t index(std::size_t n) {
    return static_cast<std::size_t>(uniform() * static_cast<double>(n)) % n;
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace selfrep
