#pragma once

// Seeded randomness with a fixed, portable derivation.
//
// Engine: std::mt19937_64 (MT19937-64, bit-exact across standard libraries).
// Per-instance seeds are derived with SplitMix64 so that instance k of a
// campaign seeded with s uses engine seed splitmix64(s ^ splitmix64(k)).
// Integers use rejection sampling on the raw 64-bit output; doubles take the
// top 53 bits; normals use Box-Muller. None of the std:: distributions are
// used because their outputs differ between implementations.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

namespace normspace {

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t instance_seed(std::uint64_t seed, std::uint64_t index) {
  return splitmix64(seed ^ splitmix64(index));
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform integer in [lo, hi].
  long uniform_int(long lo, long hi) {
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    if (span == 0) return static_cast<long>(next());
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
    std::uint64_t r;
    do r = next();
    while (r >= limit);
    return lo + static_cast<long>(r % span);
  }

  /// Uniform double in [0, 1).
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1;
    do u1 = uniform();
    while (u1 <= 0.0);
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * std::numbers::pi * u2);
    has_spare_ = true;
    return r * std::cos(2.0 * std::numbers::pi * u2);
  }

  /// Uniform direction on the unit sphere in R^n.
  std::vector<double> unit_vector(std::size_t n) {
    std::vector<double> v(n);
    double norm2;
    do {
      norm2 = 0;
      for (auto& x : v) {
        x = normal();
        norm2 += x * x;
      }
    } while (norm2 < 1e-24);
    const double s = 1.0 / std::sqrt(norm2);
    for (auto& x : v) x *= s;
    return v;
  }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0;
};

}  // namespace normspace
