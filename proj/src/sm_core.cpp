#include "smcalc/sm_core.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "smcalc/compensated.hpp"

namespace smcalc {

// ---------------------------------------------------------------------------
// CoefficientProfile

CoefficientProfile::CoefficientProfile(std::vector<IndexInterval> intervals)
    : intervals_(std::move(intervals)) {
  for (std::size_t j = 0; j < intervals_.size(); ++j) {
    const auto& iv = intervals_[j];
    if (iv.lo < 1)
      throw std::invalid_argument("profile: interval start must be >= 1");
    if (iv.lo > iv.hi)
      throw std::invalid_argument("profile: interval start exceeds its end");
    if (iv.hi == kUnboundedIndex && j + 1 != intervals_.size())
      throw std::invalid_argument(
          "profile: only the last interval may be unbounded");
    if (j > 0 && intervals_[j - 1].hi >= iv.lo)
      throw std::invalid_argument(
          "profile: intervals must be disjoint and ascending");
  }
}

CoefficientProfile CoefficientProfile::single_block(std::uint64_t lo,
                                                    std::uint64_t hi) {
  return CoefficientProfile({IndexInterval{lo, hi}});
}

CoefficientProfile CoefficientProfile::all_modes() {
  return CoefficientProfile({IndexInterval{1, kUnboundedIndex}});
}

bool CoefficientProfile::contains(std::uint64_t index) const {
  for (const auto& iv : intervals_) {
    if (index < iv.lo) return false;
    if (index <= iv.hi) return true;
  }
  return false;
}

bool CoefficientProfile::finite() const {
  return intervals_.empty() || intervals_.back().hi != kUnboundedIndex;
}

std::uint64_t CoefficientProfile::max_index() const {
  if (empty() || !finite())
    throw std::logic_error("profile: max_index needs a nonempty finite profile");
  return intervals_.back().hi;
}

bool CoefficientProfile::extends_beyond(std::uint64_t cap) const {
  return !intervals_.empty() && intervals_.back().hi > cap;
}

std::uint64_t CoefficientProfile::count_below(std::uint64_t cap) const {
  std::uint64_t n = 0;
  for (const auto& iv : intervals_) {
    if (iv.lo > cap) break;
    n += std::min(iv.hi, cap) - iv.lo + 1;
  }
  return n;
}

// ---------------------------------------------------------------------------
// RademacherSequence

namespace {

inline std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

RademacherSequence::RademacherSequence(std::uint64_t seed)
    : seed_(seed), mixed_(splitmix64(seed)) {}

int RademacherSequence::sign(std::uint64_t index) const {
  const std::uint64_t z =
      splitmix64(mixed_ ^ (index * 0xD2B74407B1CE6E93ULL));
  const int s = (z >> 63) ? -1 : 1;
  return flipped_ ? -s : s;
}

RademacherSequence RademacherSequence::with_flipped_signs() const {
  RademacherSequence copy = *this;
  copy.flipped_ = !flipped_;
  return copy;
}

// ---------------------------------------------------------------------------
// SampledPath

SampledPath::SampledPath(double t0, double dt, std::vector<double> values)
    : t0_(t0), dt_(dt), values_(std::move(values)) {
  if (!(dt_ > 0.0) || !std::isfinite(dt_) || !std::isfinite(t0_))
    throw std::domain_error("path: grid step must be positive and finite");
  if (values_.size() < 2)
    throw std::domain_error("path: need at least 2 grid values");
}

double SampledPath::at(double time) const {
  const double slack = 1e-9 * dt_;
  if (time < t0_ - slack || time > t_end() + slack)
    throw std::domain_error("path: time outside the sampled interval");
  double pos = (time - t0_) / dt_;
  const auto last = values_.size() - 1;
  if (pos <= 0.0) return values_.front();
  if (pos >= static_cast<double>(last)) return values_.back();
  const auto k = static_cast<std::size_t>(pos);
  const double theta = pos - static_cast<double>(k);
  if (theta == 0.0) return values_[k];
  return values_[k] + theta * (values_[k + 1] - values_[k]);
}

double SampledPath::min_value() const {
  return *std::min_element(values_.begin(), values_.end());
}

double SampledPath::max_value() const {
  return *std::max_element(values_.begin(), values_.end());
}

// ---------------------------------------------------------------------------
// FourierSM

FourierSM::FourierSM(CoefficientProfile profile, RademacherSequence signs,
                     TruncationPolicy truncation, double horizon)
    : profile_(std::move(profile)),
      signs_(signs),
      truncation_(truncation),
      horizon_(horizon) {
  if (!(horizon_ > 0.0) || !std::isfinite(horizon_))
    throw std::domain_error("sm: horizon must be positive and finite");
  if (truncation_.max_index < 1)
    throw std::invalid_argument("sm: truncation index must be >= 1");
}

std::uint64_t FourierSM::support_cap() const {
  // Finite profiles are summed exactly over their whole support; the
  // truncation index only cuts unbounded profiles.
  return profile_.finite() ? kUnboundedIndex : truncation_.max_index;
}

MeasureValue FourierSM::measure_of_interval(double a, double b) const {
  if (!(a >= 0.0) || a > b)
    throw std::domain_error("measure_of_interval: need 0 <= a <= b");
  if (b > horizon_ * (1.0 + 1e-12))
    throw std::domain_error("measure_of_interval: interval exceeds the horizon");
  MeasureValue out;
  KahanAccumulator acc;
  profile_.for_each_index(support_cap(), [&](std::uint64_t i) {
    const double di = static_cast<double>(i);
    acc.add(signs_.signd(i) * (std::sin(di * b) - std::sin(di * a)) / di);
  });
  out.value = acc.value();
  if (!profile_.finite() && profile_.extends_beyond(truncation_.max_index)) {
    out.tail_bound = 2.0 / static_cast<double>(truncation_.max_index);
    if (out.tail_bound > truncation_.tail_budget)
      throw std::runtime_error("measure_of_interval: tail bound above budget");
  }
  return out;
}

double FourierSM::path_value(double time) const {
  KahanAccumulator acc;
  profile_.for_each_index(support_cap(), [&](std::uint64_t i) {
    const double di = static_cast<double>(i);
    acc.add(signs_.signd(i) * std::sin(di * time) / di);
  });
  return acc.value();
}

double FourierSM::path_tail_bound() const {
  if (profile_.finite()) return 0.0;
  // sqrt(sum_{i>M} 1/i^2) <= 1/sqrt(M): mean-square scale of the omitted tail.
  return 1.0 / std::sqrt(static_cast<double>(truncation_.max_index));
}

SampledPath FourierSM::sample_path(double t0, double dt,
                                   std::size_t count) const {
  if (count < 2) throw std::domain_error("sample_path: empty grid");
  if (!(dt > 0.0)) throw std::domain_error("sample_path: dt must be positive");
  if (t0 < -1e-12 ||
      t0 + dt * static_cast<double>(count - 1) > horizon_ * (1.0 + 1e-12))
    throw std::domain_error("sample_path: grid leaves [0, horizon]");
  if (!profile_.finite() && path_tail_bound() > truncation_.tail_budget)
    throw std::runtime_error("sample_path: tail bound above budget");

  const std::uint64_t cap = support_cap();
  std::vector<double> values(count);
  for (std::size_t k = 0; k < count; ++k) {
    const double t = t0 + dt * static_cast<double>(k);
    KahanAccumulator acc;
    profile_.for_each_index(cap, [&](std::uint64_t i) {
      const double di = static_cast<double>(i);
      acc.add(signs_.signd(i) * std::sin(di * t) / di);
    });
    values[k] = acc.value();
  }
  return SampledPath(t0, dt, std::move(values));
}

FourierSM FourierSM::with_flipped_signs() const {
  return FourierSM(profile_, signs_.with_flipped_signs(), truncation_,
                   horizon_);
}

// ---------------------------------------------------------------------------
// Hoelder diagnostic

HolderDiagnostic holder_diagnostic(const SampledPath& path, int levels) {
  if (levels < 1) throw std::domain_error("holder_diagnostic: levels must be >= 1");
  const auto needed = (std::size_t{1} << levels) + 1;
  if (path.size() < needed)
    throw std::domain_error("holder_diagnostic: too few sample points");

  const double span = path.t_end() - path.t0();
  HolderDiagnostic diag;
  diag.scale_table.reserve(static_cast<std::size_t>(levels));
  for (int level = 1; level <= levels; ++level) {
    const double scale = std::ldexp(span, -level);
    double max_inc = 0.0;
    for (std::size_t k = 0; k < path.size(); ++k) {
      const double t = path.t(k);
      if (t + scale > path.t_end() + 1e-9 * path.dt()) break;
      max_inc = std::max(max_inc, std::fabs(path.at(t + scale) - path[k]));
    }
    diag.scale_table.emplace_back(scale, max_inc);
  }

  bool degenerate = false;
  for (const auto& [scale, inc] : diag.scale_table)
    if (inc <= 0.0) degenerate = true;
  if (degenerate) {
    diag.defined = false;
    diag.gamma_hat = std::numeric_limits<double>::quiet_NaN();
    return diag;
  }

  // Least-squares slope of log(max increment) against log(scale).
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const auto n = static_cast<double>(diag.scale_table.size());
  for (const auto& [scale, inc] : diag.scale_table) {
    const double lx = std::log(scale);
    const double ly = std::log(inc);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) {
    diag.defined = false;
    diag.gamma_hat = std::numeric_limits<double>::quiet_NaN();
    return diag;
  }
  diag.gamma_hat = (n * sxy - sx * sy) / denom;
  diag.defined = true;
  return diag;
}

}  // namespace smcalc
