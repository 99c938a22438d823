#pragma once

#include <cstdint>

#include "nnb/rational.hpp"

namespace nnb {

// splitmix64 finalizer. Bijective on 64-bit words.
inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Seed of trial t under run seed S. Fixed mixing function so a trial's random
// stream depends only on (S, t), never on scheduling or thread count.
inline std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t trial) {
  return mix64(seed ^ (0x9E3779B97F4A7C15ULL * (trial + 1)));
}

// splitmix64 stream. Small, portable, and identical on every platform; used
// instead of <random> distributions so reports are byte-stable.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    state_ += 0x9E3779B97F4A7C15ULL;
    return mix64(state_);
  }

  // Uniform in [0, n) via 128-bit multiply-shift.
  std::uint64_t below(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next()) * n) >> 64);
  }

  // Uniform integer in [lo, hi].
  std::int64_t int_in(std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(
                    below(static_cast<std::uint64_t>(hi - lo) + 1));
  }

  // Random rational with numerator in [num_lo, num_hi], denominator in
  // [1, den_hi].
  Rational rational(std::int64_t num_lo, std::int64_t num_hi,
                    std::int64_t den_hi) {
    Rational q(static_cast<long>(int_in(num_lo, num_hi)),
               static_cast<long>(int_in(1, den_hi)));
    q.canonicalize();
    return q;
  }

  double unit_double() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

 private:
  std::uint64_t state_;
};

}  // namespace nnb
