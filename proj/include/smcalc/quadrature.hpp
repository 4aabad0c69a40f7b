#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "smcalc/compensated.hpp"

namespace smcalc {

/// Composite Simpson rule on [a, b] with an even number of subintervals.
/// Signed: a > b yields the signed integral. Error is O(h^4) for C^4
/// integrands. Throws std::runtime_error if the result is not finite.
template <class Fn>
double composite_simpson(Fn f, double a, double b, std::uint64_t subintervals) {
  if (subintervals < 2 || (subintervals % 2) != 0)
    throw std::invalid_argument("composite_simpson: subinterval count must be even and >= 2");
  if (a == b) return 0.0;
  const double h = (b - a) / static_cast<double>(subintervals);
  KahanAccumulator odd;
  KahanAccumulator even;
  for (std::uint64_t k = 1; k < subintervals; ++k) {
    const double x = a + h * static_cast<double>(k);
    if (k % 2 == 1)
      odd.add(f(x));
    else
      even.add(f(x));
  }
  const double value =
      (h / 3.0) * (f(a) + f(b) + 4.0 * odd.value() + 2.0 * even.value());
  if (!std::isfinite(value))
    throw std::runtime_error("composite_simpson: non-finite integrand value");
  return value;
}

/// Composite Simpson with panel width chosen from a target step.
template <class Fn>
double composite_simpson_step(Fn f, double a, double b, double max_step) {
  if (!(max_step > 0.0))
    throw std::invalid_argument("composite_simpson_step: step must be positive");
  if (a == b) return 0.0;
  const double span = std::fabs(b - a);
  const auto half_panels =
      static_cast<std::uint64_t>(std::ceil(span / (2.0 * max_step)));
  const std::uint64_t n = 2 * std::max<std::uint64_t>(1, half_panels);
  return composite_simpson(f, a, b, n);
}

}  // namespace smcalc
