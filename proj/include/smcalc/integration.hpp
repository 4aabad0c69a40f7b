#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "smcalc/sm_core.hpp"

namespace smcalc {

inline constexpr double kDefaultConvergenceTol = 1e-3;
inline constexpr int kConvergenceWindow = 3;

/// Strictly increasing time points 0 = t_0 < ... < t_j = T.
class Partition {
 public:
  explicit Partition(std::vector<double> points);

  /// t_k = k*T/j for k = 0..j.
  static Partition uniform(double T, std::uint64_t j);
  /// 2^n + 1 equally spaced points on [0, T]. Levels above 30 are refused
  /// (the point array would not be addressable at a sane size).
  static Partition dyadic(double T, unsigned level);

  const std::vector<double>& points() const { return points_; }
  std::size_t interval_count() const { return points_.size() - 1; }
  double front() const { return points_.front(); }
  double back() const { return points_.back(); }
  double mesh() const;

 private:
  std::vector<double> points_;
};

/// Per-partition integral sums with a refinement-based convergence check.
/// converged is true iff the last `window` estimates pairwise differ by
/// less than tol; extrapolated_value is the finest-mesh estimate.
struct ConvergenceReport {
  std::vector<std::pair<double, double>> estimates;  // (mesh, sum), mesh decreasing
  double extrapolated_value = 0.0;
  bool converged = false;
  double spread = 0.0;
  int window = kConvergenceWindow;
  double tol = kDefaultConvergenceTol;
};

/// Midpoint-weighted (Stratonovich-style) partition sum
///   sum_k ((xi_{t_{k-1}} + xi_{t_k})/2) (eta_{t_k} - eta_{t_{k-1}}).
double symmetric_sum(const SampledPath& xi, const SampledPath& eta,
                     const Partition& p);

/// Evaluates symmetric_sum along a refinement (>= 3 partitions of strictly
/// decreasing mesh) and reports convergence of the estimates.
ConvergenceReport symmetric_integral(const SampledPath& xi,
                                     const SampledPath& eta,
                                     std::span<const Partition> refinement,
                                     double tol = kDefaultConvergenceTol);

/// Integral of f against a continuous bounded-variation path V, evaluated
/// with the same midpoint weighting as symmetric_sum so that discrete
/// identities between the two are exact.
double stieltjes_integral(const SampledPath& f_values, const SampledPath& V,
                          const Partition& p);

/// Same, with the integrand given as a function of time. Integrand values
/// are only computed where the adjacent V increments are nonzero.
double stieltjes_integral(const std::function<double(double)>& integrand,
                          const SampledPath& V, const Partition& p);

/// Left-endpoint Riemann approximation, on the path's own grid, of
///   (1/eps) * integral_0^T1 |path(s+eps) - path(s)|^n ds.
/// Requires n >= 2, eps > 0 and eps < path.t_end() - T1.
double strong_variation_estimate(const SampledPath& path, int n, double eps,
                                 double T1);

/// sum_k mu((t_{k-1}, t_k])^2 with exact interval measures.
double sum_squared_increments(const FourierSM& sm, const Partition& p);

/// Runs experiment(seed) for seed = 1..seeds and returns the empirical
/// q-quantile of the outputs. Seeds may be evaluated concurrently; results
/// are sorted before extraction, so the value is thread-count independent.
double boundedness_quantile(const std::function<double(std::uint64_t)>& experiment,
                            int seeds, double q, unsigned threads = 1);

/// Helper: uniform partitions for a list of interval counts.
std::vector<Partition> uniform_refinement(double T,
                                          std::span<const std::uint64_t> js);

}  // namespace smcalc
