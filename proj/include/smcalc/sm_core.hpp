#pragma once

#include <cstdint>
#include <limits>
#include <numbers>
#include <utility>
#include <vector>

namespace smcalc {

inline constexpr double kDefaultHorizon = 2.0 * std::numbers::pi_v<double>;

/// Closed integer interval [lo, hi] of Fourier mode indices.
/// hi == kUnboundedIndex marks a half-infinite interval [lo, inf).
struct IndexInterval {
  std::uint64_t lo = 1;
  std::uint64_t hi = 1;

  bool operator==(const IndexInterval&) const = default;
};

inline constexpr std::uint64_t kUnboundedIndex =
    std::numeric_limits<std::uint64_t>::max();

/// The {0,1} mode-selection sequence, stored as disjoint ascending integer
/// intervals. contains(i) is a pure membership query; an empty profile
/// selects no modes at all.
class CoefficientProfile {
 public:
  CoefficientProfile() = default;

  /// Validates: lo >= 1, lo <= hi, intervals strictly ascending and disjoint
  /// (prev.hi < next.lo); an unbounded interval may only come last.
  explicit CoefficientProfile(std::vector<IndexInterval> intervals);

  static CoefficientProfile single_block(std::uint64_t lo, std::uint64_t hi);
  /// All modes: alpha_i = 1 for every i >= 1.
  static CoefficientProfile all_modes();

  bool contains(std::uint64_t index) const;
  const std::vector<IndexInterval>& intervals() const { return intervals_; }
  bool empty() const { return intervals_.empty(); }
  /// True when no interval is unbounded.
  bool finite() const;
  /// Largest selected index; requires finite() and !empty().
  std::uint64_t max_index() const;
  /// True if some selected index exceeds cap.
  bool extends_beyond(std::uint64_t cap) const;
  /// Number of selected indices in [1, cap].
  std::uint64_t count_below(std::uint64_t cap) const;

  /// Calls fn(i) for every selected index i <= cap, in increasing order.
  template <class Fn>
  void for_each_index(std::uint64_t cap, Fn fn) const {
    for (const auto& iv : intervals_) {
      if (iv.lo > cap) break;
      const std::uint64_t hi = std::min(iv.hi, cap);
      for (std::uint64_t i = iv.lo; i <= hi; ++i) fn(i);
    }
  }

  bool operator==(const CoefficientProfile&) const = default;

 private:
  std::vector<IndexInterval> intervals_;
};

/// Deterministic counter-based Rademacher signs: sign(i) in {-1,+1} is a
/// pure function of (seed, index), so queries are order-independent and
/// Monte Carlo runs are reproducible by construction.
class RademacherSequence {
 public:
  explicit RademacherSequence(std::uint64_t seed);

  int sign(std::uint64_t index) const;
  double signd(std::uint64_t index) const {
    return static_cast<double>(sign(index));
  }

  std::uint64_t seed() const { return seed_; }
  bool flipped() const { return flipped_; }
  /// Copy with every sign negated (for symmetry checks).
  RademacherSequence with_flipped_signs() const;

 private:
  std::uint64_t seed_ = 0;
  std::uint64_t mixed_ = 0;
  bool flipped_ = false;
};

/// Truncation control for series evaluation. max_index only applies to
/// profiles with an unbounded interval: finite profiles are always summed
/// over their whole support, exactly. If a truncated evaluation reports a
/// tail bound above tail_budget, the evaluation throws.
struct TruncationPolicy {
  std::uint64_t max_index = std::uint64_t{1} << 16;
  double tail_budget = std::numeric_limits<double>::infinity();
};

/// Value of a measure evaluation together with a certified truncation
/// bound. For truncated series the bound is a mean-square-scale estimate
/// (2/M for interval measures): the pathwise worst case over signs is not
/// summable, so no sure bound exists.
struct MeasureValue {
  double value = 0.0;
  double tail_bound = 0.0;
};

/// A path sampled on a uniform time grid t_k = t0 + k*dt. Values between
/// grid points are obtained by linear interpolation.
class SampledPath {
 public:
  SampledPath(double t0, double dt, std::vector<double> values);

  template <class Fn>
  static SampledPath from_function(double t0, double dt, std::size_t count,
                                   Fn fn) {
    std::vector<double> v(count);
    for (std::size_t k = 0; k < count; ++k)
      v[k] = fn(t0 + dt * static_cast<double>(k));
    return SampledPath(t0, dt, std::move(v));
  }

  double t0() const { return t0_; }
  double dt() const { return dt_; }
  std::size_t size() const { return values_.size(); }
  double t_end() const {
    return t0_ + dt_ * static_cast<double>(values_.size() - 1);
  }
  double t(std::size_t k) const { return t0_ + dt_ * static_cast<double>(k); }
  double operator[](std::size_t k) const { return values_[k]; }
  const std::vector<double>& values() const { return values_; }

  /// Linear interpolation; throws std::domain_error outside [t0, t_end]
  /// (with a tiny rounding allowance at the ends).
  double at(double time) const;

  double min_value() const;
  double max_value() const;

 private:
  double t0_;
  double dt_;
  std::vector<double> values_;
};

/// The random Fourier-series stochastic measure
///   mu(A) = sum_i alpha_i * sign_i * integral_A cos(i t) dt
/// on Borel subsets of [0, horizon]. Interval measures and path values are
/// exact sums over the (finite or truncated) support.
class FourierSM {
 public:
  FourierSM(CoefficientProfile profile, RademacherSequence signs,
            TruncationPolicy truncation = {},
            double horizon = kDefaultHorizon);

  FourierSM(CoefficientProfile profile, std::uint64_t seed,
            TruncationPolicy truncation = {},
            double horizon = kDefaultHorizon)
      : FourierSM(std::move(profile), RademacherSequence(seed), truncation,
                  horizon) {}

  /// mu((a, b]) = sum_i alpha_i sign_i (sin(i b) - sin(i a)) / i.
  /// Requires 0 <= a <= b <= horizon.
  MeasureValue measure_of_interval(double a, double b) const;

  /// Path mu_t = mu((0, t]) sampled on the grid t_k = t0 + k*dt.
  /// The grid must lie inside [0, horizon] and have at least 2 points.
  SampledPath sample_path(double t0, double dt, std::size_t count) const;

  /// Series value at a single time (same truncation as sample_path).
  double path_value(double time) const;

  /// Mean-square bound on the omitted path tail: sqrt(sum_{i>M} 1/i^2).
  /// Zero for finite profiles.
  double path_tail_bound() const;

  FourierSM with_flipped_signs() const;

  const CoefficientProfile& profile() const { return profile_; }
  const RademacherSequence& signs() const { return signs_; }
  const TruncationPolicy& truncation() const { return truncation_; }
  double horizon() const { return horizon_; }

 private:
  std::uint64_t support_cap() const;

  CoefficientProfile profile_;
  RademacherSequence signs_;
  TruncationPolicy truncation_;
  double horizon_;
};

/// Dyadic-scale increment table and least-squares slope estimate of the
/// path's Hoelder exponent. Diagnostic only.
struct HolderDiagnostic {
  double gamma_hat = 0.0;
  /// False when some scale has zero max increment (slope undefined);
  /// gamma_hat is NaN in that case.
  bool defined = false;
  /// (scale, max increment at that scale), one row per dyadic level.
  std::vector<std::pair<double, double>> scale_table;
};

/// Requires at least 2^levels + 1 sample points.
HolderDiagnostic holder_diagnostic(const SampledPath& path, int levels);

}  // namespace smcalc
