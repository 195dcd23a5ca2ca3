#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

#include "ansgd/errors.hpp"

namespace ansgd {

// Seeded 64-bit Mersenne twister. Index and real draws are computed from the
// raw engine output rather than std:: distributions, whose algorithms are
// implementation-defined, so streams are identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform integer in [0, n). Lemire's multiply-shift with rejection.
  std::size_t uniform_index(std::size_t n) {
    if (n == 0) throw ArgumentError("uniform_index: empty range");
    const std::uint64_t range = n;
    unsigned __int128 m = static_cast<unsigned __int128>(next()) * range;
    auto low = static_cast<std::uint64_t>(m);
    if (low < range) {
      const std::uint64_t threshold = (0 - range) % range;
      while (low < threshold) {
        m = static_cast<unsigned __int128>(next()) * range;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::size_t>(m >> 64);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  friend bool operator==(const Rng&, const Rng&) = default;

 private:
  std::mt19937_64 engine_;
};

}  // namespace ansgd
