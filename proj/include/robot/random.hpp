#pragma once

// Seeded sampling with a fixed, platform-independent algorithm chain.
//
// std::normal_distribution and friends are implementation-defined, so the
// same seed would give different streams under libstdc++ and libc++. Here
// every draw goes through std::mt19937_64 (fully specified by the standard)
// and the transforms below:
//   uniform(0,1):  top 53 bits of one engine output, shifted off zero
//   normal:        Box-Muller, both variates of a pair are used
//   cauchy:        tan(pi * (u - 1/2))
//   below(k):      rejection sampling on the top bits, no modulo bias

#include <bit>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <utility>
#include <vector>

namespace robot {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on the open interval (0, 1).
  double uniform() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double r = std::sqrt(-2.0 * std::log(uniform()));
    const double phi = 2.0 * std::numbers::pi * uniform();
    spare_ = r * std::sin(phi);
    has_spare_ = true;
    return r * std::cos(phi);
  }

  double cauchy() { return std::tan(std::numbers::pi * (uniform() - 0.5)); }

  bool bernoulli(double p) { return uniform() < p; }

  /// Uniform integer in [0, k).
  std::uint64_t below(std::uint64_t k) {
    if (k <= 1) return 0;
    const int bits = 64 - std::countl_zero(k - 1);
    for (;;) {
      const std::uint64_t v = engine_() >> (64 - bits);
      if (v < k) return v;
    }
  }

  /// Fisher-Yates permutation of 0..k-1.
  std::vector<std::size_t> permutation(std::size_t k) {
    std::vector<std::size_t> p(k);
    for (std::size_t i = 0; i < k; ++i) p[i] = i;
    for (std::size_t i = k; i > 1; --i) std::swap(p[i - 1], p[below(i)]);
    return p;
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace robot
