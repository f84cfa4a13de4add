#pragma once

#include <cmath>
#include <cstdint>

namespace amlab {

// splitmix64 finalizer; also used to derive per-replica stream seeds.
inline std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Stream seed for replica k of a master seed. Pinned so that runs are
// reproducible across machines: stream(k) = splitmix64(master + (k+1)*golden).
inline std::uint64_t stream_seed(std::uint64_t master, std::uint64_t k) {
  return splitmix64(master + (k + 1) * 0x9E3779B97F4A7C15ULL);
}

// xoshiro256++ (Blackman & Vigna), seeded via splitmix64 expansion.
// One instance per chain / per Monte Carlo worker; never shared.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t z = seed;
    for (auto& w : state_) {
      z = splitmix64(z);
      w = z;
    }
    seed_ = seed;
  }

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // uniform on [0,1), 53-bit resolution
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // uniform on (0,1]; safe under log()
  double uniform_pos() {
    return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
  }

  // standard normal, Marsaglia polar method (second variate discarded so the
  // draw sequence is a pure function of the stream position)
  double normal() {
    for (;;) {
      const double u = 2.0 * uniform01() - 1.0;
      const double v = 2.0 * uniform01() - 1.0;
      const double s = u * u + v * v;
      if (s > 0.0 && s < 1.0) {
        return u * std::sqrt(-2.0 * std::log(s) / s);
      }
    }
  }

  // Gamma(shape, 1) via Marsaglia-Tsang; shape > 0
  double gamma(double shape) {
    if (shape < 1.0) {
      const double u = uniform_pos();
      return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x = normal();
      double v = 1.0 + c * x;
      if (v <= 0.0) continue;
      v = v * v * v;
      const double u = uniform_pos();
      if (std::log(u) < 0.5 * x * x + d - d * v + d * std::log(v)) {
        return d * v;
      }
    }
  }

  double chi_squared(double nu) { return 2.0 * gamma(0.5 * nu); }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t state_[4]{};
  std::uint64_t seed_ = 0;
};

}  // namespace amlab
