#ifndef CALIBRON_RNG_HPP
#define CALIBRON_RNG_HPP

// Seeded, splittable random source with pinned bit-to-double conversions, so
// that every sampling routine in the library is reproducible byte-for-byte
// given the same seed.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "calibron/exterior.hpp"

namespace calibron {

class SplitRng {
public:
  explicit SplitRng(std::uint64_t seed) : seed_(seed), eng_(seed) {}

  // Independent child stream; derivation is a fixed hash of (seed, stream),
  // so split(k) is stable no matter how much the parent has been consumed.
  SplitRng split(std::uint64_t stream) const { return SplitRng(mix(seed_ ^ mix(stream + 0x9e3779b97f4a7c15ull))); }

  std::uint64_t seed() const { return seed_; }

  // Uniform in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + (b - a) * uniform01(); }

  // Standard normal via Box-Muller (implementation pinned; the standard
  // library's normal_distribution sequence is implementation-defined).
  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform01(), u2 = uniform01();
    while (u1 == 0.0) u1 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  exterior::RealVector gaussian_vector(int dim) {
    exterior::RealVector v(dim);
    for (int i = 0; i < dim; ++i) v[i] = gaussian();
    return v;
  }

  // Uniform point on the unit sphere S^{dim-1}.
  exterior::RealVector unit_vector(int dim) {
    for (;;) {
      exterior::RealVector v = gaussian_vector(dim);
      const double n = v.norm();
      if (n > 1e-12) {
        v *= 1.0 / n;
        return v;
      }
    }
  }

private:
  static std::uint64_t mix(std::uint64_t z) {
    // splitmix64 finalizer
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  std::uint64_t seed_;
  std::mt19937_64 eng_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace calibron

#endif  // CALIBRON_RNG_HPP
