#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "smcalc/sm_core.hpp"

namespace smtest {

// Small deterministic generator for property-style loops.
struct TestRng {
  std::uint64_t state;

  explicit TestRng(std::uint64_t seed) : state(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  double uniform(double lo, double hi) {
    const double u = static_cast<double>(next_u64() >> 11) * 0x1p-53;
    return lo + u * (hi - lo);
  }

  std::uint64_t index(std::uint64_t lo, std::uint64_t hi) {
    return lo + next_u64() % (hi - lo + 1);
  }
};

// Hand-rolled Simpson oracle, independent of the library quadrature.
template <class Fn>
double simpson_oracle(Fn f, double a, double b, int panels = 2000) {
  const int n = 2 * panels;
  const double h = (b - a) / n;
  double odd = 0.0, even = 0.0;
  for (int k = 1; k < n; ++k) {
    const double x = a + h * k;
    (k % 2 ? odd : even) += f(x);
  }
  return h / 3.0 * (f(a) + f(b) + 4.0 * odd + 2.0 * even);
}

// Random small finite profile with 1..3 blocks inside [1, 64].
inline smcalc::CoefficientProfile random_profile(TestRng& rng) {
  const int blocks = static_cast<int>(rng.index(1, 3));
  std::vector<smcalc::IndexInterval> ivs;
  std::uint64_t lo = rng.index(1, 8);
  for (int b = 0; b < blocks; ++b) {
    const std::uint64_t hi = lo + rng.index(0, 12);
    if (hi > 64) break;
    ivs.push_back({lo, hi});
    lo = hi + 2 + rng.index(0, 8);
    if (lo > 60) break;
  }
  if (ivs.empty()) ivs.push_back({1, 4});
  return smcalc::CoefficientProfile(ivs);
}

}  // namespace smtest
