#pragma once

#include <cstdint>
#include <initializer_list>
#include <cmath>
#include <random>

namespace aicc {

/// Seeded 64-bit Mersenne Twister with platform-independent real sampling.
///
/// std::mt19937_64 and std::seed_seq are bit-exact across standard library
/// implementations; the distribution classes are not, so uniform and
/// exponential variates are derived from the raw 64-bit output here.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  /// Independent stream keyed by a seed and up to three coordinates
  /// (e.g. epoch, batch, instance).
  static Rng substream(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0,
                       std::uint64_t c = 0) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(a),    static_cast<std::uint32_t>(a >> 32),
                      static_cast<std::uint32_t>(b),    static_cast<std::uint32_t>(b >> 32),
                      static_cast<std::uint32_t>(c),    static_cast<std::uint32_t>(c >> 32)};
    Rng r;
    r.engine_.seed(seq);
    return r;
  }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform on [lo, hi].
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Exponential with the given mean; 0 for a non-positive mean.
  double exponential(double mean) {
    if (mean <= 0.0) return 0.0;
    return -mean * std::log1p(-uniform());
  }

  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) { return n == 0 ? 0 : engine_() % n; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace aicc
