// Acceptance suite: runs every release criterion end to end and prints one
// pass/fail line per criterion. Exit code 0 only when all criteria hold.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <limits>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "smcalc/calculus.hpp"
#include "smcalc/counterexamples.hpp"
#include "smcalc/integration.hpp"
#include "smcalc/sde.hpp"
#include "smcalc/sm_core.hpp"

using namespace smcalc;

namespace {

constexpr double kPi = std::numbers::pi_v<double>;
constexpr double kTwoPi = 2.0 * kPi;

struct Criterion {
  std::string label;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

struct Rng {
  std::uint64_t state;
  explicit Rng(std::uint64_t seed) : state(seed) {}
  std::uint64_t next() {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }
  double uniform(double lo, double hi) {
    return lo + (hi - lo) * (static_cast<double>(next() >> 11) * 0x1p-53);
  }
  std::uint64_t index(std::uint64_t lo, std::uint64_t hi) {
    return lo + next() % (hi - lo + 1);
  }
};

CoefficientProfile random_small_profile(Rng& rng) {
  std::vector<IndexInterval> ivs;
  std::uint64_t lo = rng.index(1, 8);
  const int blocks = static_cast<int>(rng.index(1, 3));
  for (int b = 0; b < blocks && lo <= 56; ++b) {
    const std::uint64_t hi = std::min<std::uint64_t>(lo + rng.index(0, 10), 63);
    ivs.push_back({lo, hi});
    lo = hi + 2 + rng.index(0, 6);
  }
  return CoefficientProfile(ivs);
}

double quantile_of(std::vector<double> values, double q) {
  std::sort(values.begin(), values.end());
  const auto rank = static_cast<std::size_t>(
      std::ceil(q * static_cast<double>(values.size())));
  return values[std::min(values.size() - 1, rank == 0 ? 0 : rank - 1)];
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

// ---------------------------------------------------------------------------

Criterion criterion1_parseval() {
  Criterion c;
  c.label = "C1 series partial sums inside the certified band";
  bool ok = true;
  double worst = -1.0;
  const std::uint64_t M = 1000000;
  for (double eps : {1.0, 0.5, 0.1}) {
    const auto r = parseval_check(eps, M);
    const double err = std::fabs(r.partial_sum - r.target);
    worst = std::max(worst, err - r.tail_bound);
    ok = ok && err <= r.tail_bound + 1e-9;
  }
  c.pass = ok;
  c.detail = "eps in {1, 0.5, 0.1}, M=1e6, worst band excess " + fmt(worst);
  return c;
}

Criterion criterion2_telescoping() {
  Criterion c;
  c.label = "C2 midpoint-sum telescoping identities";
  Rng rng(20240811);
  bool ok = true;
  double worst = 0.0;
  const auto ones = SampledPath::from_function(0.0, kTwoPi / 4.0, 5,
                                               [](double) { return 1.0; });
  // Relative errors are measured against max(1, |expected|): the telescoped
  // values can legitimately vanish.
  for (int rep = 0; rep < 50; ++rep) {
    const FourierSM sm(random_small_profile(rng), rng.next());
    const auto eta = sm.sample_path(0.0, kTwoPi / 2048.0, 2049);
    const double T = rng.uniform(0.5, kTwoPi);
    const Partition p =
        rep % 2 == 0
            ? Partition::uniform(T, rng.index(2, 1500))
            : Partition::dyadic(T, static_cast<unsigned>(rng.index(1, 10)));
    const double eta_T = eta.at(p.back());
    const double eta_0 = eta[0];
    const double want2 = 0.5 * (eta_T * eta_T - eta_0 * eta_0);
    const double e1 = std::fabs(symmetric_sum(ones, eta, p) - (eta_T - eta_0)) /
                      std::max(1.0, std::fabs(eta_T - eta_0));
    const double e2 = std::fabs(symmetric_sum(eta, eta, p) - want2) /
                      std::max(1.0, std::fabs(want2));
    worst = std::max({worst, e1, e2});
    ok = ok && e1 <= 1e-12 && e2 <= 1e-12;
  }
  c.pass = ok;
  c.detail = "50 random triples, worst relative error " + fmt(worst);
  return c;
}

Criterion criterion3_chain_rule() {
  Criterion c;
  c.label = "C3 change-of-variable identity across the field catalog";
  const auto profile = CoefficientProfile::single_block(1, 8);
  std::vector<Partition> parts;
  for (std::uint64_t j : {256, 1024, 4096})
    parts.push_back(Partition::uniform(kTwoPi, j));
  bool ok = true;
  double worst = 0.0;
  std::string first_fail;
  for (const std::string field : {"linear", "quadratic", "bilinear", "sin-shift"}) {
    for (const std::string vname : {"zero", "t", "half-t"}) {
      const auto V = SampledPath::from_function(
          0.0, kTwoPi / 1024.0, 1025, [&](double t) {
            return vname == "zero" ? 0.0 : vname == "t" ? t : 0.5 * t;
          });
      for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const FourierSM sm(profile, seed);
        const auto mu = sm.sample_path(0.0, kTwoPi / 4096.0, 4097);
        const auto check =
            verify_chain_rule(field_catalog(field), mu, V, parts, 1e-2);
        worst = std::max(worst, check.residual);
        bool mono = true;
        double prev = std::numeric_limits<double>::infinity();
        for (const auto& [mesh, value] : check.lhs.estimates) {
          const double res = std::fabs(value - check.rhs);
          if (res > prev + 1e-12) mono = false;  // noise floor on "decreasing"
          prev = res;
        }
        if (!(check.residual < 1e-2 && mono) && first_fail.empty())
          first_fail = field + "/" + vname + "/seed " + std::to_string(seed);
        ok = ok && check.residual < 1e-2 && mono;
      }
    }
  }
  c.pass = ok;
  c.detail = "4 fields x 3 drifts x 5 seeds, worst residual " + fmt(worst) +
             (first_fail.empty() ? "" : ", first failure " + first_fail);
  return c;
}

Criterion criterion4_substitution() {
  Criterion c;
  c.label = "C4 substitution rule for composed integrators";
  const auto profile = CoefficientProfile::single_block(1, 8);
  const FourierSM sm(profile, 1);
  const auto mu = sm.sample_path(0.0, kTwoPi / 4096.0, 4097);
  const auto V = SampledPath::from_function(0.0, kTwoPi / 1024.0, 1025,
                                            [](double t) { return t; });
  std::vector<Partition> parts;
  for (std::uint64_t j : {256, 1024, 4096})
    parts.push_back(Partition::uniform(kTwoPi, j));

  bool ok = true;
  double worst_general = 0.0, worst_identity = 0.0;
  for (const std::string g : {"identity-g", "square-g"}) {
    for (const std::string f : {"unit", "linear"}) {
      const auto check = verify_substitution_rule(
          field_catalog(f), field_catalog(g), mu, V, parts, 1e-2);
      if (g == "identity-g") {
        worst_identity = std::max(worst_identity, check.residual);
        ok = ok && check.residual <= 1e-12;
      } else {
        worst_general = std::max(worst_general, check.residual);
        ok = ok && check.residual < 1e-2;
      }
    }
  }
  c.pass = ok;
  c.detail = "identity residual " + fmt(worst_identity) +
             ", general residual " + fmt(worst_general);
  return c;
}

Criterion criterion5_doss_sussmann() {
  Criterion c;
  c.label = "C5 pathwise solver against closed-form solutions";
  const auto profile = CoefficientProfile::single_block(1, 8);
  double worst_exp = 0.0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const FourierSM sm(profile, seed);
    const auto mu = sm.sample_path(0.0, kTwoPi / 4096.0, 4097);
    const auto sol = solve_sde(sigma_catalog("linear-sigma"),
                               drift_catalog("zero-drift"), 1.0, mu, 1e-3);
    for (std::size_t k = 0; k < mu.size(); ++k)
      worst_exp = std::max(worst_exp, std::fabs(sol.X[k] - std::exp(mu[k])));
  }

  const FourierSM sm(profile, 1);
  const auto mu = sm.sample_path(0.0, kTwoPi / 4096.0, 4097);
  const auto ode = solve_sde(sigma_catalog("zero-sigma"),
                             drift_catalog("linear-drift"), 1.0, mu, 1e-3);
  double worst_ode = 0.0;
  for (std::size_t k = 0; k < mu.size(); ++k)
    worst_ode = std::max(worst_ode, std::fabs(ode.X[k] - std::exp(mu.t(k))));

  c.pass = worst_exp < 1e-5 && worst_ode < 1e-7;
  c.detail = "geometric error " + fmt(worst_exp) +
             " (< 1e-5, 5 seeds), plain ODE error " + fmt(worst_ode) +
             " (< 1e-7)";
  return c;
}

Criterion criterion6_solution_identity() {
  Criterion c;
  c.label = "C6 integral identity across the coefficient catalog";
  // Horizon 1 keeps every catalog combination well scaled (the linear drift
  // grows exponentially in T); x0 = 1, seed 7, grid 2^12.
  const double T = 1.0;
  const auto profile = CoefficientProfile::single_block(1, 4);
  const FourierSM sm(profile, 7);
  const auto mu = sm.sample_path(0.0, T / 4096.0, 4097);
  const auto fine = Partition::uniform(T, 4096);
  const auto coarse = Partition::uniform(T, 256);

  bool ok = true;
  double worst = 0.0;
  std::string first_fail;
  for (const auto& sname : sigma_catalog_names()) {
    const auto sigma = sigma_catalog(sname, 1.0);
    for (const auto& bname : drift_catalog_names()) {
      const auto b = drift_catalog(bname, 1.0);
      const auto sol = solve_sde(sigma, b, 1.0, mu, 1e-3);
      for (const std::string psi : {"unit", "coord-v"}) {
        const double res_fine = verify_solution_identity(
            sol, sigma, b, mu, field_catalog(psi), fine);
        const double res_coarse = verify_solution_identity(
            sol, sigma, b, mu, field_catalog(psi), coarse);
        worst = std::max(worst, res_fine);
        const bool good =
            res_fine < 1e-2 && res_fine <= std::max(res_coarse, 1e-12);
        if (!good && first_fail.empty())
          first_fail = sname + "/" + bname + "/" + psi;
        ok = ok && good;
      }
    }
  }
  c.pass = ok;
  c.detail = "24 combinations at T=1, worst fine residual " + fmt(worst) +
             (first_fail.empty() ? "" : ", first failure " + first_fail);
  return c;
}

Criterion criterion7_inverse_pde() {
  Criterion c;
  c.label = "C7 inverse-flow transport equation residuals";
  const auto lin =
      build_flow(sigma_catalog("linear-sigma"), -1.0, 1.0, -2.0, 2.0, 1e-3);
  const double res_lin = check_inverse_pde(lin, 500);
  const auto con =
      build_flow(sigma_catalog("const-sigma", 0.7), -1.0, 1.0, -2.0, 2.0, 1e-3);
  const double res_con = check_inverse_pde(con, 500);
  c.pass = res_lin < 1e-4 && res_con < 1e-6;
  c.detail = "linear " + fmt(res_lin) + " (< 1e-4), constant " + fmt(res_con) +
             " (< 1e-6)";
  return c;
}

Criterion criterion8_oscillator1() {
  Criterion c;
  c.label = "C8 oscillating quadratic-variation certificate (depth 2)";
  const auto cert = construct_oscillator1(2, 1e-3);
  bool ok = cert.eps.size() == 4;
  for (int k = 0; k < 4 && ok; ++k) {
    const double f = cert.f_values[static_cast<std::size_t>(k)];
    const double err = cert.f_errors[static_cast<std::size_t>(k)];
    ok = (k % 2 == 0) ? (f - err > 0.5) : (f + err < 0.25);
  }
  ok = ok && reverify(cert);
  c.pass = ok;
  c.detail = "f values {" + fmt(cert.f_values[0]) + ", " +
             fmt(cert.f_values[1]) + ", " + fmt(cert.f_values[2]) + ", " +
             fmt(cert.f_values[3]) +
             "}, re-verified by independent re-summation";
  return c;
}

Criterion criterion9_oscillator2() {
  Criterion c;
  c.label = "C9 oscillating dyadic-sum certificate (depth 2, 100 seeds)";
  const auto cert = construct_oscillator2(2, 100);
  bool ok = cert.depth == 2;
  for (double s : cert.S_diagonal) ok = ok && s >= 2.0;
  for (double a : cert.A_values) ok = ok && a < 0.25;
  for (double eb : cert.EB_values) ok = ok && eb < 1.0 / 16.0;
  for (double fr : cert.fraction_below_one) ok = ok && fr >= 0.9;
  ok = ok && reverify(cert);

  // The closed-form diagonal must match brute-force summation exactly.
  Rng rng(99);
  double worst = 0.0;
  for (int rep = 0; rep < 20; ++rep) {
    const auto level = static_cast<unsigned>(rng.index(4, 8));
    const std::uint64_t cap = (std::uint64_t{1} << (level - 1)) - 1;
    const std::uint64_t lo = rng.index(1, std::max<std::uint64_t>(1, cap / 2));
    const CoefficientProfile prof({IndexInterval{lo, rng.index(lo, cap)}});
    const FourierSM sm(prof, rng.next());
    const double diag = diagonal_S(prof, level);
    const double brute =
        sum_squared_increments(sm, Partition::dyadic(kTwoPi, level));
    worst = std::max(worst, std::fabs(diag - brute));
    ok = ok && std::fabs(diag - brute) < 1e-10;
  }
  c.pass = ok;
  c.detail = "S_diag {" + fmt(cert.S_diagonal[0]) + ", " +
             fmt(cert.S_diagonal[1]) + "} >= 2, A {" + fmt(cert.A_values[0]) +
             ", " + fmt(cert.A_values[1]) + "} < 1/4, E[B] {" +
             fmt(cert.EB_values[0]) + ", " + fmt(cert.EB_values[1]) +
             "} < 1/16, fractions {" + fmt(cert.fraction_below_one[0]) + ", " +
             fmt(cert.fraction_below_one[1]) +
             "} >= 0.9, diagonal-vs-brute worst gap " + fmt(worst);
  return c;
}

Criterion criterion10_cubic_trend() {
  Criterion c;
  c.label = "C10 cubic-variation trend in the window width";
  const auto profile = CoefficientProfile::single_block(1, 64);
  const std::vector<double> eps = {0.1, 0.05, 0.01};
  const int seeds = 50;
  const double horizon = kTwoPi + 0.15;
  std::vector<std::vector<double>> samples(eps.size());
  for (int s = 1; s <= seeds; ++s) {
    const FourierSM sm(profile, static_cast<std::uint64_t>(s),
                       TruncationPolicy{}, horizon);
    const auto path = sm.sample_path(0.0, horizon / 16384.0, 16385);
    for (std::size_t e = 0; e < eps.size(); ++e)
      samples[e].push_back(strong_variation_estimate(path, 3, eps[e], kTwoPi));
  }
  std::vector<double> q95;
  q95.reserve(samples.size());
  for (auto& v : samples) q95.push_back(quantile_of(v, 0.95));
  const bool mono = q95[1] < q95[0] && q95[2] < q95[1];
  const bool drop = q95[2] < 0.2 * q95[0];
  c.pass = mono && drop;
  c.detail = "q95 {" + fmt(q95[0]) + ", " + fmt(q95[1]) + ", " + fmt(q95[2]) +
             "}; trend surrogate only, the eps->0 limit itself is out of "
             "reach at this scale";
  return c;
}

Criterion criterion11_boundedness() {
  Criterion c;
  c.label = "C11 dyadic-sum quantile stability across levels";
  const auto profile = CoefficientProfile::single_block(1, 64);
  std::vector<double> q99;
  for (unsigned level : {6u, 8u, 10u}) {
    q99.push_back(boundedness_quantile(
        [&](std::uint64_t s) {
          const FourierSM sm(profile, s);
          return sum_squared_increments(sm, Partition::dyadic(kTwoPi, level));
        },
        100, 0.99));
  }
  const double hi = *std::max_element(q99.begin(), q99.end());
  const double lo = *std::min_element(q99.begin(), q99.end());
  c.pass = hi < 2.0 * lo;
  c.detail = "q99 {" + fmt(q99[0]) + ", " + fmt(q99[1]) + ", " + fmt(q99[2]) +
             "}, spread factor " + fmt(hi / lo) + " (required < 2)";
  if (!c.pass) {
    // Levels 8 and 10 are deterministic here (support 64 < 2^7) and equal
    // the closed-form diagonal sums, which decay ~4x per two levels for any
    // fixed finite mode block, so the requested spread cannot hold for this
    // profile. With wide mode content the sums are level-stable:
    std::vector<double> flat;
    const auto wide = CoefficientProfile::single_block(1, 32768);
    for (unsigned level : {6u, 8u, 10u}) {
      std::vector<double> vals;
      for (std::uint64_t s = 1; s <= 100; ++s)
        vals.push_back(empirical_dyadic_S(wide, level, s));
      flat.push_back(quantile_of(vals, 0.99));
    }
    c.detail += "; info: with modes [1, 32768] the same q99 are {" +
                fmt(flat[0]) + ", " + fmt(flat[1]) + ", " + fmt(flat[2]) + "}";
  }
  return c;
}

}  // namespace

int main() {
  using Clock = std::chrono::steady_clock;
  const std::vector<std::pair<std::function<Criterion()>, double>> runners = {
      {criterion1_parseval, 5.0},      {criterion2_telescoping, 0.0},
      {criterion3_chain_rule, 30.0},   {criterion4_substitution, 0.0},
      {criterion5_doss_sussmann, 0.0}, {criterion6_solution_identity, 0.0},
      {criterion7_inverse_pde, 0.0},   {criterion8_oscillator1, 60.0},
      {criterion9_oscillator2, 0.0},   {criterion10_cubic_trend, 0.0},
      {criterion11_boundedness, 0.0}};

  int failures = 0;
  double total = 0.0;
  for (const auto& [run, budget] : runners) {
    const auto start = Clock::now();
    Criterion crit;
    try {
      crit = run();
    } catch (const std::exception& e) {
      crit.label = "criterion crashed";
      crit.pass = false;
      crit.detail = std::string("exception: ") + e.what();
    }
    crit.seconds = std::chrono::duration<double>(Clock::now() - start).count();
    total += crit.seconds;
    if (budget > 0.0 && crit.seconds >= budget) {
      crit.pass = false;
      crit.detail += "; runtime budget " + fmt(budget) + " s exceeded";
    }
    if (!crit.pass) ++failures;
    std::printf("[%s] %s: %s (%.2f s)\n", crit.pass ? "PASS" : "FAIL",
                crit.label.c_str(), crit.detail.c_str(), crit.seconds);
  }
  std::printf("%d/11 criteria passed in %.1f s\n", 11 - failures, total);
  return failures == 0 ? 0 : 1;
}
