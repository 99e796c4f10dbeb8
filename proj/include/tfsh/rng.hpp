#pragma once

// Seeded uniform draws for the random mesh segments.
//
// Engine: std::mt19937_64 (the algorithm is fully specified by the standard,
// so a seed reproduces the same stream on every platform). Doubles are mapped
// from the raw 64-bit output as ((x >> 11) + 0.5) * 2^-53, which lands in the
// open interval (0,1); std::uniform_real_distribution is avoided because its
// output is implementation-defined.

#include <cstdint>
#include <random>

namespace tfsh {

class UniformOpen01 {
 public:
  explicit UniformOpen01(std::uint64_t seed) : eng_(seed) {}

  double next() {
    const std::uint64_t x = eng_();
    return (static_cast<double>(x >> 11) + 0.5) * 0x1.0p-53;
  }

 private:
  std::mt19937_64 eng_;
};

}  // namespace tfsh
