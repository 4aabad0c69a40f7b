#include "smcalc/counterexamples.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <unordered_map>

#include "smcalc/compensated.hpp"

namespace smcalc {

namespace {

constexpr double kPi = std::numbers::pi_v<double>;
constexpr double kTwoPi = 2.0 * kPi;

// sin^2(i eps / 2) / (i^2 eps)
inline double qv_term(std::uint64_t i, double eps) {
  const double di = static_cast<double>(i);
  const double s = std::sin(0.5 * di * eps);
  return s * s / (di * di * eps);
}

// Sum of qv_term over the closed range [lo, hi]; 0 when empty.
double range_sum(std::uint64_t lo, std::uint64_t hi, double eps,
                 unsigned threads) {
  if (hi < lo) return 0.0;
  return indexed_sum(lo, hi, [eps](std::uint64_t i) { return qv_term(i, eps); },
                     threads);
}

// Sum of qv_term over the profile's support clipped at cap.
double profile_qv_sum(const CoefficientProfile& profile, double eps,
                      std::uint64_t cap, unsigned threads) {
  KahanAccumulator acc;
  for (const auto& iv : profile.intervals()) {
    if (iv.lo > cap) break;
    acc.add(range_sum(iv.lo, std::min(iv.hi, cap), eps, threads));
  }
  return acc.value();
}

// sin(i pi 2^-level): the angle is reduced exactly using the 2^{level+1}
// periodicity of i before any floating multiplication, so the argument
// stays in [0, 2 pi) even for very large i.
inline double dyadic_sin(std::uint64_t i, unsigned level) {
  const std::uint64_t period = std::uint64_t{1} << (level + 1);
  const std::uint64_t reduced = i & (period - 1);
  const double ratio =
      static_cast<double>(reduced) / static_cast<double>(std::uint64_t{1} << level);
  return std::sin(ratio * kPi);
}

// 2 (2^level / i^2) sin^2(i pi 2^-level)
inline double diagonal_term(std::uint64_t i, unsigned level) {
  const double s = dyadic_sin(i, level);
  const double di = static_cast<double>(i);
  return 2.0 * std::ldexp(1.0, static_cast<int>(level)) * s * s / (di * di);
}

// Hard bound on sum_{i >= lo} diagonal_term(i, level):
// 2^{level+1} sum_{i >= lo} i^-2 <= 2^{level+1} / (lo - 1).
inline double diagonal_tail_bound(std::uint64_t lo, unsigned level) {
  return std::ldexp(1.0, static_cast<int>(level) + 1) /
         static_cast<double>(lo - 1);
}

}  // namespace

// ---------------------------------------------------------------------------
// Quadratic-variation series

ParsevalResult parseval_check(double eps, std::uint64_t M, unsigned threads) {
  if (!(eps > 0.0) || !(eps < kTwoPi))
    throw std::domain_error("parseval_check: eps must lie in (0, 2 pi)");
  if (M < 1) throw std::domain_error("parseval_check: M must be positive");
  ParsevalResult out;
  out.partial_sum = range_sum(1, M, eps, threads);
  out.tail_bound = 1.0 / (static_cast<double>(M) * eps);
  out.target = (kTwoPi - eps) / 8.0;
  return out;
}

FOfEps f_of_eps(const CoefficientProfile& profile, double eps, std::uint64_t M,
                unsigned threads) {
  if (!(eps > 0.0)) throw std::domain_error("f_of_eps: eps must be positive");
  if (M < 1) throw std::domain_error("f_of_eps: M must be positive");
  FOfEps out;
  out.value = profile_qv_sum(profile, eps, M, threads);
  out.error =
      profile.extends_beyond(M) ? 1.0 / (static_cast<double>(M) * eps) : 0.0;
  return out;
}

double quadratic_variation_mc(const CoefficientProfile& profile, double eps,
                              std::uint64_t grid_points, std::uint64_t seed) {
  if (!profile.finite())
    throw std::invalid_argument("quadratic_variation_mc: profile must be finite");
  if (grid_points < 1024)
    throw std::domain_error("quadratic_variation_mc: need >= 1024 grid points");
  if (!(eps > 0.0))
    throw std::domain_error("quadratic_variation_mc: eps must be positive");

  const RademacherSequence signs(seed);
  auto mu_at = [&](double t) {
    KahanAccumulator acc;
    profile.for_each_index(kUnboundedIndex, [&](std::uint64_t i) {
      const double di = static_cast<double>(i);
      acc.add(signs.signd(i) * std::sin(di * t) / di);
    });
    return acc.value();
  };

  const double width = kTwoPi / static_cast<double>(grid_points);
  KahanAccumulator acc;
  for (std::uint64_t k = 0; k < grid_points; ++k) {
    const double s = width * static_cast<double>(k);
    const double d = mu_at(s + eps) - mu_at(s);
    acc.add(d * d * width);
  }
  return acc.value() / eps;
}

// ---------------------------------------------------------------------------
// Dyadic sums

double diagonal_S(const CoefficientProfile& profile, unsigned level,
                  unsigned threads) {
  if (profile.empty()) return 0.0;
  if (!profile.finite())
    throw std::invalid_argument("diagonal_S: profile must be finite");
  if (level < 2 || level > 62)
    throw std::domain_error("diagonal_S: level out of range");
  if (profile.max_index() >= (std::uint64_t{1} << (level - 1)))
    throw std::domain_error(
        "diagonal_S: support must stay strictly below 2^(level-1)");
  KahanAccumulator acc;
  for (const auto& iv : profile.intervals())
    acc.add(indexed_sum(iv.lo, iv.hi,
                        [level](std::uint64_t i) { return diagonal_term(i, level); },
                        threads));
  return acc.value();
}

double empirical_dyadic_S(const CoefficientProfile& profile, unsigned level,
                          std::uint64_t seed) {
  if (!profile.finite())
    throw std::invalid_argument("empirical_dyadic_S: profile must be finite");
  if (level < 1 || level > 62)
    throw std::domain_error("empirical_dyadic_S: level out of range");
  if (profile.empty()) return 0.0;

  // Only index pairs with i - j or i + j divisible by 2^level survive the
  // sum over the dyadic intervals, so the realized value reduces to
  // residue-class sums of u_i = sign_i a_i (-1)^(i div 2^level) with
  // a_i = 2 sin(i pi 2^-level) / i:
  //   S = 2^(level-1) [ sum_r U_r^2 + U_0^2 - sum_{r>=1} U_r U_{2^level-r} ].
  const std::uint64_t mod = std::uint64_t{1} << level;
  const RademacherSequence signs(seed);
  std::unordered_map<std::uint64_t, double> classes;
  profile.for_each_index(kUnboundedIndex, [&](std::uint64_t i) {
    const double a = 2.0 * dyadic_sin(i, level) / static_cast<double>(i);
    const double parity = ((i >> level) & 1u) ? -1.0 : 1.0;
    classes[i & (mod - 1)] += signs.signd(i) * a * parity;
  });

  std::vector<std::pair<std::uint64_t, double>> accum(classes.begin(),
                                                      classes.end());
  std::sort(accum.begin(), accum.end());
  auto class_value = [&](std::uint64_t r) -> double {
    const auto it = std::lower_bound(
        accum.begin(), accum.end(), r,
        [](const auto& entry, std::uint64_t key) { return entry.first < key; });
    return (it != accum.end() && it->first == r) ? it->second : 0.0;
  };

  KahanAccumulator total;
  for (const auto& [r, u] : accum) {
    total.add(u * u);
    if (r == 0)
      total.add(u * u);
    else
      total.add(-u * class_value(mod - r));
  }
  return std::ldexp(total.value(), static_cast<int>(level) - 1);
}

// ---------------------------------------------------------------------------
// Oscillation construction 1: f(eps) has no limit

namespace {

struct Osc1State {
  std::vector<IndexInterval> blocks;
  std::vector<double> eps;
  std::vector<double> head_values;
  std::vector<double> tail_bounds;
  std::vector<std::uint64_t> tail_start;
  int depth = 0;
  double margin = 0.0;
};

Oscillator1Certificate finalize_oscillator1(const Osc1State& st,
                                            unsigned threads) {
  Oscillator1Certificate cert;
  cert.profile = CoefficientProfile(st.blocks);
  cert.eps = st.eps;
  cert.head_values = st.head_values;
  cert.tail_bounds = st.tail_bounds;
  cert.tail_start = st.tail_start;
  cert.depth = st.depth;
  cert.margin = st.margin;
  for (double e : st.eps) {
    // All terms are nonnegative, so the compensated sum's rounding error is
    // bounded by ~2u times the value itself.
    const double v = profile_qv_sum(cert.profile, e, kUnboundedIndex, threads);
    cert.f_values.push_back(v);
    cert.f_errors.push_back(4.4e-16 * v + 1e-300);
  }
  return cert;
}

[[noreturn]] void osc1_budget_error(const std::string& what,
                                    const Osc1State& st, unsigned threads) {
  throw Oscillator1BudgetError(what, finalize_oscillator1(st, threads));
}

}  // namespace

Oscillator1Certificate construct_oscillator1(int depth, double margin,
                                             const SearchBudget& budget,
                                             unsigned threads) {
  if (depth < 1) throw std::domain_error("oscillator1: depth must be >= 1");
  if (!(margin > 0.0) || margin >= 0.08)
    throw std::domain_error(
        "oscillator1: margin must lie in (0, 0.08); larger margins leave no "
        "room between the full-series value and the 1/2 threshold");

  Osc1State st;
  st.margin = margin;
  if (depth > budget.max_depth)
    osc1_budget_error("oscillator1: depth exceeds the search budget", st,
                      threads);

  const double upper_thr = 0.5 + margin;        // block sums must exceed this
  const double head_thr = 0.125 - margin;       // even-step heads stay below
  // All-index head target before placing the next block; the extra margin
  // guarantees the subsequent block search terminates.
  const double odd_head_target = (kTwoPi - 1.0) / 8.0 - 0.5 - 2.0 * margin;

  auto shrink_eps = [&](double eps, auto&& small_enough) {
    double e = eps;
    do {
      e *= 0.5;
      if (e < budget.min_eps)
        osc1_budget_error("oscillator1: eps fell below the search budget", st,
                          threads);
    } while (!small_enough(e));
    return e;
  };

  // Smallest n >= m with sum_{i in [m, n]} qv_term(i, eps) > threshold.
  auto find_block_end = [&](std::uint64_t m, double eps, double threshold) {
    std::uint64_t lo = m - 1;  // sum over [m, lo] is <= threshold (empty at start)
    std::uint64_t hi = lo;
    double partial = 0.0;
    std::uint64_t span = 1;
    while (true) {
      if (hi >= budget.max_index)
        osc1_budget_error("oscillator1: block search hit the index budget", st,
                          threads);
      const std::uint64_t next = std::min(budget.max_index, hi + span);
      partial += range_sum(hi + 1, next, eps, threads);
      hi = next;
      if (partial > threshold) break;
      lo = hi;
      span *= 2;
    }
    while (hi - lo > 1) {
      const std::uint64_t mid = lo + (hi - lo) / 2;
      if (range_sum(m, mid, eps, threads) > threshold)
        hi = mid;
      else
        lo = mid;
    }
    return hi;
  };

  std::uint64_t m = 1;
  double eps = 1.0;
  for (int j = 1; j <= depth; ++j) {
    st.depth = j - 1;
    if (j > 1) {
      eps = shrink_eps(eps, [&](double e) {
        return range_sum(1, m - 1, e, threads) < odd_head_target;
      });
    }
    st.eps.push_back(eps);

    const std::uint64_t n = find_block_end(m, eps, upper_thr);
    st.blocks.push_back(IndexInterval{m, n});

    const CoefficientProfile so_far(st.blocks);
    const double eps_even = shrink_eps(eps, [&](double e) {
      return profile_qv_sum(so_far, e, kUnboundedIndex, threads) < head_thr;
    });
    st.eps.push_back(eps_even);
    st.head_values.push_back(
        profile_qv_sum(so_far, eps_even, kUnboundedIndex, threads));

    // Smallest tail cut with the hard bound 1/((m'-1) eps) < 1/8 - margin.
    const double min_cut = 1.0 / (eps_even * head_thr) + 1.0;
    std::uint64_t m_next =
        std::max<std::uint64_t>(n + 1, static_cast<std::uint64_t>(min_cut) + 1);
    while (1.0 / (static_cast<double>(m_next - 1) * eps_even) >= head_thr)
      ++m_next;
    if (m_next > budget.max_index)
      osc1_budget_error("oscillator1: tail cut exceeds the index budget", st,
                        threads);
    st.tail_start.push_back(m_next);
    st.tail_bounds.push_back(1.0 /
                             (static_cast<double>(m_next - 1) * eps_even));

    m = m_next;
    eps = eps_even;
  }
  st.depth = depth;

  Oscillator1Certificate cert = finalize_oscillator1(st, threads);
  for (int k = 0; k < 2 * depth; ++k) {
    const bool odd = (k % 2) == 0;  // eps_1, eps_3, ... sit at even indices
    const double f = cert.f_values[static_cast<std::size_t>(k)];
    const double err = cert.f_errors[static_cast<std::size_t>(k)];
    if (odd && !(f - err > 0.5))
      throw std::logic_error("oscillator1: upper oscillation lost");
    if (!odd && !(f + err < 0.25))
      throw std::logic_error("oscillator1: lower oscillation lost");
  }
  return cert;
}

bool reverify(const Oscillator1Certificate& cert) {
  if (cert.depth < 1) return false;
  const auto n_eps = static_cast<std::size_t>(2 * cert.depth);
  if (cert.eps.size() != n_eps || cert.f_values.size() != n_eps ||
      cert.f_errors.size() != n_eps)
    return false;
  if (cert.tail_start.size() != static_cast<std::size_t>(cert.depth) ||
      cert.tail_bounds.size() != static_cast<std::size_t>(cert.depth) ||
      cert.head_values.size() != static_cast<std::size_t>(cert.depth))
    return false;
  if (cert.profile.intervals().size() != static_cast<std::size_t>(cert.depth))
    return false;

  for (std::size_t k = 1; k < n_eps; ++k)
    if (!(cert.eps[k] < cert.eps[k - 1])) return false;

  // Independent re-summation in extended precision, sequential order.
  auto resum = [&](double eps, std::uint64_t cap) {
    long double total = 0.0L;
    const auto leps = static_cast<long double>(eps);
    for (const auto& iv : cert.profile.intervals()) {
      if (iv.lo > cap) break;
      const std::uint64_t hi = std::min(iv.hi, cap);
      for (std::uint64_t i = iv.lo; i <= hi; ++i) {
        const auto di = static_cast<long double>(i);
        const long double s = sinl(0.5L * di * leps);
        total += s * s / (di * di * leps);
      }
    }
    return static_cast<double>(total);
  };

  for (std::size_t k = 0; k < n_eps; ++k) {
    const double f = resum(cert.eps[k], kUnboundedIndex);
    if (std::fabs(f - cert.f_values[k]) >
        1e-9 * std::max(1.0, std::fabs(cert.f_values[k])))
      return false;
    const double err = cert.f_errors[k];
    if (k % 2 == 0 && !(f - err > 0.5)) return false;
    if (k % 2 == 1 && !(f + err < 0.25)) return false;
  }

  // Even-step decomposition: finite head below 1/8 and a certified bound on
  // everything at or beyond the recorded tail cut.
  for (int j = 0; j < cert.depth; ++j) {
    const double eps_even = cert.eps[static_cast<std::size_t>(2 * j + 1)];
    const std::uint64_t cut = cert.tail_start[static_cast<std::size_t>(j)];
    const auto& blocks = cert.profile.intervals();
    if (cut <= blocks[static_cast<std::size_t>(j)].hi) return false;
    long double head = 0.0L;
    for (int b = 0; b <= j; ++b) {
      const auto& iv = blocks[static_cast<std::size_t>(b)];
      for (std::uint64_t i = iv.lo; i <= iv.hi; ++i)
        head += static_cast<long double>(qv_term(i, eps_even));
    }
    const double bound =
        1.0 / (static_cast<double>(cut - 1) * eps_even);
    if (!(static_cast<double>(head) < 0.125)) return false;
    if (!(bound < 0.125)) return false;
    if (std::fabs(bound - cert.tail_bounds[static_cast<std::size_t>(j)]) >
        1e-12 * bound)
      return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Oscillation construction 2: sum of squared dyadic increments has no limit

namespace {

// Certified bound on the expected tail E[B] at `level` when every future
// index is >= next_start: the exact sum over the next block (indices
// divisible by 2^{level-1} drop out in expectation) plus a hard bound on
// everything beyond it.
double certified_expected_tail(unsigned level, unsigned next_scale,
                               bool include_block, unsigned threads) {
  const std::uint64_t lo = std::uint64_t{1} << (next_scale - 2);
  if (!include_block) return diagonal_tail_bound(lo, level);
  const std::uint64_t hi = (std::uint64_t{1} << (next_scale - 1)) - 1;
  const std::uint64_t half = std::uint64_t{1} << (level - 1);
  const double block = indexed_sum(
      lo, hi,
      [level, half](std::uint64_t i) {
        return (i % half == 0) ? 0.0 : diagonal_term(i, level);
      },
      threads);
  return block + diagonal_tail_bound(std::uint64_t{1} << next_scale, level);
}

[[noreturn]] void osc2_budget_error(const std::string& what,
                                    Oscillator2Certificate cert) {
  throw Oscillator2BudgetError(what, std::move(cert));
}

}  // namespace

Oscillator2Certificate construct_oscillator2(int depth, int seeds,
                                             double margin,
                                             const SearchBudget& budget,
                                             unsigned threads) {
  if (depth < 1) throw std::domain_error("oscillator2: depth must be >= 1");
  if (seeds < 1) throw std::domain_error("oscillator2: need at least one seed");
  if (!(margin > 0.0) || margin >= 1.0 / 16.0)
    throw std::domain_error("oscillator2: margin must lie in (0, 1/16)");

  Oscillator2Certificate cert;
  cert.depth = 0;
  cert.seeds = seeds;
  cert.margin = margin;
  if (depth > budget.max_depth)
    osc2_budget_error("oscillator2: depth exceeds the search budget", cert);

  std::vector<IndexInterval> blocks;
  unsigned scale = 4;  // first block [4, 7]
  for (int j = 1; j <= depth; ++j) {
    const std::uint64_t lo = std::uint64_t{1} << (scale - 2);
    const std::uint64_t hi = (std::uint64_t{1} << (scale - 1)) - 1;
    if (hi > budget.max_index)
      osc2_budget_error("oscillator2: block exceeds the index budget", cert);
    blocks.push_back(IndexInterval{lo, hi});
    cert.profile = CoefficientProfile(blocks);
    cert.n_scales.push_back(scale);
    cert.S_diagonal.push_back(diagonal_S(cert.profile, scale, threads));
    cert.depth = j;

    // Head scale: diagonal contribution of the existing blocks drops below
    // 1/4 as the partition refines.
    unsigned tilde = scale + 1;
    double head = diagonal_S(cert.profile, tilde, threads);
    while (!(head < 0.25 - margin)) {
      ++tilde;
      if (tilde > budget.max_level)
        osc2_budget_error("oscillator2: head scale exceeds the level budget",
                          cert);
      head = diagonal_S(cert.profile, tilde, threads);
    }
    cert.tilde_scales.push_back(tilde);
    cert.A_values.push_back(head);

    // Next block scale: certified expected tail at the head scale < 1/16.
    const bool more_blocks = j < depth;
    unsigned next = tilde + 2;
    double eb;
    while (true) {
      if (next > 62 ||
          (more_blocks &&
           ((std::uint64_t{1} << (next - 1)) - 1) > budget.max_index))
        osc2_budget_error("oscillator2: next scale exceeds the index budget",
                          cert);
      eb = certified_expected_tail(tilde, next, more_blocks, threads);
      if (eb < 1.0 / 16.0 - margin) break;
      ++next;
    }
    cert.EB_values.push_back(eb);
    if (more_blocks)
      scale = next;
    else
      cert.continuation_scale = next;
  }

  for (double s : cert.S_diagonal)
    if (!(s >= 2.0))
      throw std::logic_error("oscillator2: diagonal bound lost");

  for (std::size_t j = 0; j < cert.tilde_scales.size(); ++j) {
    std::vector<double> samples(static_cast<std::size_t>(seeds));
    for (int s = 0; s < seeds; ++s)
      samples[static_cast<std::size_t>(s)] = empirical_dyadic_S(
          cert.profile, cert.tilde_scales[j], static_cast<std::uint64_t>(s) + 1);
    const auto below = static_cast<double>(
        std::count_if(samples.begin(), samples.end(),
                      [](double v) { return v < 1.0; }));
    cert.fraction_below_one.push_back(below / static_cast<double>(seeds));
    cert.S_empirical.push_back(std::move(samples));
  }
  return cert;
}

bool reverify(const Oscillator2Certificate& cert) {
  const auto d = static_cast<std::size_t>(cert.depth);
  if (cert.depth < 1) return false;
  if (cert.n_scales.size() != d || cert.tilde_scales.size() != d ||
      cert.S_diagonal.size() != d || cert.A_values.size() != d ||
      cert.EB_values.size() != d)
    return false;
  if (cert.profile.intervals().size() != d) return false;

  unsigned prev = 0;
  for (std::size_t j = 0; j < d; ++j) {
    if (!(cert.n_scales[j] > prev)) return false;
    if (!(cert.tilde_scales[j] > cert.n_scales[j])) return false;
    prev = cert.tilde_scales[j];
    const auto& iv = cert.profile.intervals()[j];
    if (iv.lo != (std::uint64_t{1} << (cert.n_scales[j] - 2)) ||
        iv.hi != (std::uint64_t{1} << (cert.n_scales[j] - 1)) - 1)
      return false;
  }
  if (!(cert.continuation_scale > cert.tilde_scales.back())) return false;

  auto close = [](double a, double b) {
    return std::fabs(a - b) <= 1e-9 * std::max(1.0, std::fabs(b));
  };
  for (std::size_t j = 0; j < d; ++j) {
    const CoefficientProfile head(std::vector<IndexInterval>(
        cert.profile.intervals().begin(),
        cert.profile.intervals().begin() + static_cast<std::ptrdiff_t>(j) + 1));
    const double s_diag = diagonal_S(head, cert.n_scales[j]);
    if (!close(s_diag, cert.S_diagonal[j]) || !(s_diag >= 2.0)) return false;
    const double a = diagonal_S(head, cert.tilde_scales[j]);
    if (!close(a, cert.A_values[j]) || !(a < 0.25)) return false;
    const bool more = j + 1 < d;
    const unsigned next =
        more ? cert.n_scales[j + 1] : cert.continuation_scale;
    const double eb =
        certified_expected_tail(cert.tilde_scales[j], next, more, 1);
    if (!close(eb, cert.EB_values[j]) || !(eb < 1.0 / 16.0)) return false;
  }

  if (cert.seeds > 0 && cert.S_empirical.size() == d &&
      cert.fraction_below_one.size() == d) {
    for (std::size_t j = 0; j < d; ++j) {
      if (cert.S_empirical[j].size() != static_cast<std::size_t>(cert.seeds))
        return false;
      int below = 0;
      for (int s = 0; s < cert.seeds; ++s) {
        const double v = empirical_dyadic_S(cert.profile, cert.tilde_scales[j],
                                            static_cast<std::uint64_t>(s) + 1);
        if (!close(v, cert.S_empirical[j][static_cast<std::size_t>(s)]))
          return false;
        if (v < 1.0) ++below;
      }
      const double frac =
          static_cast<double>(below) / static_cast<double>(cert.seeds);
      if (!close(frac, cert.fraction_below_one[j])) return false;
    }
  }
  return true;
}

}  // namespace smcalc
