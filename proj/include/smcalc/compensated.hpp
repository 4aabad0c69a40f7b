#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <thread>
#include <vector>

namespace smcalc {

/// Kahan summation to compensate for precision loss in long sums.
struct KahanAccumulator {
  double sum = 0.0;
  double compensation = 0.0;

  void add(double value) {
    const double y = value - compensation;
    const double t = sum + y;
    compensation = (t - sum) - y;
    sum = t;
  }

  double value() const { return sum; }
};

/// Like KahanAccumulator but also tracks the sum of |terms|, which bounds
/// the rounding error of the compensated sum by ~2u * abs_sum.
struct CertifiedAccumulator {
  KahanAccumulator acc;
  KahanAccumulator abs;

  void add(double value) {
    acc.add(value);
    abs.add(value < 0 ? -value : value);
  }

  double value() const { return acc.value(); }
  /// Conservative bound on the accumulated floating-point error.
  double rounding_bound() const { return 4.4e-16 * abs.value(); }
};

inline constexpr std::uint64_t kSumBlock = std::uint64_t{1} << 16;

/// Sums term(i) over the closed index range [first, last].
///
/// The range is cut into fixed blocks of 2^16 indices; each block is
/// Kahan-summed on its own and the block partials are combined in index
/// order. The combination tree is fixed, so the result is bit-identical
/// for every thread count.
template <class TermFn>
double indexed_sum(std::uint64_t first, std::uint64_t last, TermFn term,
                   unsigned threads = 1) {
  if (last < first) return 0.0;
  const std::uint64_t count = last - first + 1;
  const std::uint64_t blocks = (count + kSumBlock - 1) / kSumBlock;

  auto block_sum = [&](std::uint64_t b) {
    KahanAccumulator acc;
    const std::uint64_t lo = first + b * kSumBlock;
    const std::uint64_t hi = std::min(last, lo + (kSumBlock - 1));
    for (std::uint64_t i = lo; i <= hi; ++i) acc.add(term(i));
    return acc.value();
  };

  if (threads <= 1 || blocks < 2) {
    KahanAccumulator total;
    for (std::uint64_t b = 0; b < blocks; ++b) total.add(block_sum(b));
    return total.value();
  }

  std::vector<double> partial(static_cast<std::size_t>(blocks), 0.0);
  std::atomic<std::uint64_t> next{0};
  auto worker = [&] {
    for (std::uint64_t b; (b = next.fetch_add(1)) < blocks;)
      partial[static_cast<std::size_t>(b)] = block_sum(b);
  };
  const unsigned n =
      std::min<unsigned>(threads, static_cast<unsigned>(
                                      std::min<std::uint64_t>(blocks, 64)));
  std::vector<std::thread> pool;
  pool.reserve(n);
  for (unsigned t = 0; t < n; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  KahanAccumulator total;
  for (double p : partial) total.add(p);
  return total.value();
}

}  // namespace smcalc
