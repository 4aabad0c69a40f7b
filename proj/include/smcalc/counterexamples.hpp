#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "smcalc/sm_core.hpp"

namespace smcalc {

/// Search limits for the greedy constructions. Exceeding a limit raises a
/// budget error carrying the partial certificate built so far.
struct SearchBudget {
  std::uint64_t max_index = std::uint64_t{1} << 26;
  double min_eps = 0x1p-20;
  int max_depth = 4;
  unsigned max_level = 24;
};

/// Partial sum of the quadratic-variation series together with a hard tail
/// bound: partial_sum = sum_{i<=M} sin^2(i eps/2) / (i^2 eps),
/// tail_bound = 1/(M eps) >= omitted tail, target = (2 pi - eps)/8.
/// |partial_sum - target| <= tail_bound holds for every (eps, M).
struct ParsevalResult {
  double partial_sum = 0.0;
  double tail_bound = 0.0;
  double target = 0.0;
};

ParsevalResult parseval_check(double eps, std::uint64_t M,
                              unsigned threads = 1);

/// f(eps) restricted to the profile, summed up to index M:
/// value = sum over selected i <= M of sin^2(i eps/2) / (i^2 eps);
/// error = 1/(M eps) when the profile extends beyond M, else 0.
struct FOfEps {
  double value = 0.0;
  double error = 0.0;
};

FOfEps f_of_eps(const CoefficientProfile& profile, double eps,
                std::uint64_t M, unsigned threads = 1);

/// Certificate of the eps-oscillation construction: a finite block profile
/// and a strictly decreasing eps sequence with
///   f(eps_{2k-1}) - error > 1/2   and   f(eps_{2k}) + error < 1/4.
struct Oscillator1Certificate {
  CoefficientProfile profile;
  std::vector<double> eps;        // 2*depth entries, strictly decreasing
  std::vector<double> f_values;   // f(eps_i) over the final profile
  std::vector<double> f_errors;   // rounding bounds for the sums above
  /// Tail cut indices m_{j+1} chosen at each even step, with the certified
  /// bound sum_{i >= m} sin^2(i eps/2)/(i^2 eps) <= 1/((m-1) eps) < 1/8.
  std::vector<std::uint64_t> tail_start;
  std::vector<double> tail_bounds;
  /// Finite-profile head sums at the even eps (each < 1/8 - margin).
  std::vector<double> head_values;
  int depth = 0;
  double margin = 0.0;
};

class Oscillator1BudgetError : public std::runtime_error {
 public:
  Oscillator1BudgetError(const std::string& what, Oscillator1Certificate cert)
      : std::runtime_error(what), partial(std::move(cert)) {}
  Oscillator1Certificate partial;
};

/// Greedy construction: grow block [m_j, n_j] until its sum at eps_{2j-1}
/// exceeds 1/2 + margin; halve eps until the head drops below 1/8 - margin
/// and cut the tail at m_{j+1}; halve eps again until the all-index head
/// leaves room for the next block. Margins absorb summation rounding.
/// Requires depth >= 1 and 0 < margin < 0.08 (larger margins leave no room
/// between the full-series value and the 1/2 threshold).
Oscillator1Certificate construct_oscillator1(int depth, double margin = 1e-3,
                                             const SearchBudget& budget = {},
                                             unsigned threads = 1);

/// Recomputes every sum in the certificate from scratch (long-double
/// accumulation, independent of the construction path) and rechecks all
/// certified inequalities.
bool reverify(const Oscillator1Certificate& cert);

/// Riemann-sum evaluation of the pathwise quadratic-variation integral
///   (1/eps) * integral_0^{2 pi} (mu_{s+eps} - mu_s)^2 ds
/// for one sign realization. Equals 4 pi f(eps) up to quadrature error for
/// every realization. Requires a finite profile and grid_points >= 1024.
double quadratic_variation_mc(const CoefficientProfile& profile, double eps,
                              std::uint64_t grid_points, std::uint64_t seed);

/// Exact deterministic value of sum_k mu(Delta_k)^2 over the dyadic level-n
/// partition of [0, 2 pi]:  2 sum_i alpha_i (2^n / i^2) sin^2(i pi 2^-n).
/// Valid (all cross terms vanish) only when the support stays strictly
/// below 2^{n-1}; otherwise a precondition error is thrown.
double diagonal_S(const CoefficientProfile& profile, unsigned level,
                  unsigned threads = 1);

/// Exact per-realization value of sum_k mu(Delta_k)^2 at dyadic level n,
/// computed from the residue-class pair structure of the trigonometric
/// sums (only index pairs with i-j or i+j divisible by 2^n survive).
/// Agrees with sum_squared_increments on the same partition.
double empirical_dyadic_S(const CoefficientProfile& profile, unsigned level,
                          std::uint64_t seed);

/// Certificate of the dyadic-scale oscillation construction: blocks
/// [2^{n_j-2}, 2^{n_j-1}-1] with deterministic diagonal sums >= 2 at the
/// scales n_j, and interleaved scales tilde-n_j where the head A < 1/4 and
/// the expected tail E[B] < 1/16 are certified; the realized sums at the
/// tilde scales are sampled over seeds.
struct Oscillator2Certificate {
  CoefficientProfile profile;
  std::vector<unsigned> n_scales;       // n_j
  std::vector<unsigned> tilde_scales;   // tilde-n_j
  unsigned continuation_scale = 0;      // n_{depth+1} certifying E[B] at the last tilde scale
  std::vector<double> S_diagonal;       // diagonal sum at n_j (>= 2)
  std::vector<double> A_values;         // head at tilde-n_j (< 1/4)
  std::vector<double> EB_values;        // certified E[B] at tilde-n_j (< 1/16)
  std::vector<std::vector<double>> S_empirical;  // realized sums, seeds 1..seeds
  std::vector<double> fraction_below_one;
  int depth = 0;
  int seeds = 0;
  double margin = 0.0;
};

class Oscillator2BudgetError : public std::runtime_error {
 public:
  Oscillator2BudgetError(const std::string& what, Oscillator2Certificate cert)
      : std::runtime_error(what), partial(std::move(cert)) {}
  Oscillator2Certificate partial;
};

Oscillator2Certificate construct_oscillator2(int depth, int seeds,
                                             double margin = 1e-3,
                                             const SearchBudget& budget = {},
                                             unsigned threads = 1);

/// Recomputes the diagonal sums, head values and expected-tail bounds from
/// the recorded scales and rechecks every certified inequality, plus the
/// recorded empirical fractions from the recorded seeds.
bool reverify(const Oscillator2Certificate& cert);

}  // namespace smcalc
