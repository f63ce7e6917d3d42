#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace incl {

// SplitMix64 (Steele, Lea, Flood 2014): 64-bit state, Weyl increment
// 0x9E3779B97F4A7C15 followed by the variant-13 finalizer. Chosen because the
// output stream is fixed by the algorithm, so every suite is bit-reproducible
// across compilers and standard libraries.
class SplitMix64 {
 public:
  explicit constexpr SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  constexpr std::uint64_t next() noexcept {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

  // Standard normal via Box-Muller; the second variate is discarded so the
  // stream position depends only on the number of calls.
  double normal() noexcept {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  // Independent child stream for a numbered block of work.
  SplitMix64 split(std::uint64_t block) const noexcept {
    SplitMix64 mixer(state_ ^ (0xD1B54A32D192ED03ULL * (block + 1)));
    return SplitMix64(mixer.next());
  }

  std::uint64_t state() const noexcept { return state_; }

 private:
  std::uint64_t state_;
};

}  // namespace incl
