#include "smcalc/sde.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace smcalc {

namespace {

inline std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Uniform double in [0, 1) from a counter-based stream.
inline double uniform01(std::uint64_t seed, std::uint64_t counter) {
  return static_cast<double>(splitmix64(seed ^ (counter * 0xD2B74407B1CE6E93ULL)) >> 11) *
         0x1p-53;
}

}  // namespace

// ---------------------------------------------------------------------------
// FlowTable evaluation

double FlowTable::eval(double r, double x) const {
  const double r_hi = r_max();
  const double x_hi = x_max();
  const double r_slack = 1e-9 * std::max(1.0, std::fabs(r_hi - r0_));
  const double x_slack = 1e-9 * std::max(1.0, std::fabs(x_hi - x0_));
  if (r < r0_ - r_slack || r > r_hi + r_slack)
    throw std::domain_error("flow: r outside the tabulated range");
  if (x < x0_ - x_slack || x > x_hi + x_slack)
    throw std::domain_error("flow: x outside the tabulated range");
  r = std::clamp(r, r0_, r_hi);
  x = std::clamp(x, x0_, x_hi);

  const double xpos = (x - x0_) / dx_;
  const auto j = std::min(cols_ - 2, static_cast<std::size_t>(std::max(0.0, xpos)));
  const double xi = xpos - static_cast<double>(j);

  const double rpos = (r - r0_) / dr_;
  const auto i = std::min(rows_ - 2, static_cast<std::size_t>(std::max(0.0, rpos)));
  const double th = rpos - static_cast<double>(i);

  const double Fa = node_F(i, j) + xi * (node_F(i, j + 1) - node_F(i, j));
  if (th == 0.0) return Fa;
  const double Fb =
      node_F(i + 1, j) + xi * (node_F(i + 1, j + 1) - node_F(i + 1, j));
  if (th == 1.0) return Fb;

  // Cubic Hermite in r; the exact row derivatives dF/dr = sigma(F) are known.
  const double ma = dr_ * sigma_.value(Fa);
  const double mb = dr_ * sigma_.value(Fb);
  const double t2 = th * th, t3 = t2 * th;
  return (2 * t3 - 3 * t2 + 1) * Fa + (t3 - 2 * t2 + th) * ma +
         (-2 * t3 + 3 * t2) * Fb + (t3 - t2) * mb;
}

double FlowTable::eval_dx(double r, double x) const {
  const double r_hi = r_max();
  const double x_hi = x_max();
  if (r < r0_ - 1e-9 || r > r_hi + 1e-9 || x < x0_ - 1e-9 || x > x_hi + 1e-9)
    throw std::domain_error("flow: point outside the tabulated range");
  r = std::clamp(r, r0_, r_hi);
  x = std::clamp(x, x0_, x_hi);

  const double xpos = (x - x0_) / dx_;
  const auto j = std::min(cols_ - 2, static_cast<std::size_t>(std::max(0.0, xpos)));
  const double xi = xpos - static_cast<double>(j);
  const double rpos = (r - r0_) / dr_;
  const auto i = std::min(rows_ - 2, static_cast<std::size_t>(std::max(0.0, rpos)));
  const double th = rpos - static_cast<double>(i);

  const double Pa = node_P(i, j) + xi * (node_P(i, j + 1) - node_P(i, j));
  if (th == 0.0) return Pa;
  const double Pb =
      node_P(i + 1, j) + xi * (node_P(i + 1, j + 1) - node_P(i + 1, j));
  if (th == 1.0) return Pb;
  const double Fa = node_F(i, j) + xi * (node_F(i, j + 1) - node_F(i, j));
  const double Fb =
      node_F(i + 1, j) + xi * (node_F(i + 1, j + 1) - node_F(i + 1, j));
  // dP/dr = sigma'(F) P along the flow.
  const double ma = dr_ * sigma_.d1(Fa) * Pa;
  const double mb = dr_ * sigma_.d1(Fb) * Pb;
  const double t2 = th * th, t3 = t2 * th;
  return (2 * t3 - 3 * t2 + 1) * Pa + (t3 - 2 * t2 + th) * ma +
         (-2 * t3 + 3 * t2) * Pb + (t3 - t2) * mb;
}

double FlowTable::invert(double r, double y) const {
  double lo = x_min();
  double hi = x_max();
  double flo = eval(r, lo);
  double fhi = eval(r, hi);
  const double slack = 1e-9 * std::max(1.0, std::fabs(fhi - flo));
  if (y < flo - slack || y > fhi + slack)
    throw std::domain_error("flow: value outside the achieved range at r");
  if (y <= flo) return lo;
  if (y >= fhi) return hi;
  for (int it = 0; it < 64 && hi - lo > 0.0; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if (eval(r, mid) < y)
      lo = mid;
    else
      hi = mid;
  }
  double x = 0.5 * (lo + hi);
  // One derivative-based correction.
  const double p = eval_dx(r, x);
  if (p > 0.0) {
    const double corrected = x - (eval(r, x) - y) / p;
    if (corrected >= x_min() && corrected <= x_max()) x = corrected;
  }
  return x;
}

// ---------------------------------------------------------------------------
// Flow tabulation

FlowTable build_flow(const Sigma& sigma, double r_lo, double r_hi, double x_lo,
                     double x_hi, double h, std::size_t x_cells) {
  if (!sigma.value || !sigma.d1 || !sigma.d2)
    throw std::invalid_argument("flow: sigma needs value, d1 and d2");
  if (!(h > 0.0)) throw std::invalid_argument("flow: step must be positive");
  if (!(x_lo < x_hi) || !std::isfinite(x_lo) || !std::isfinite(x_hi))
    throw std::invalid_argument("flow: bad x range");
  if (!std::isfinite(r_lo) || !std::isfinite(r_hi) || !(r_lo <= r_hi))
    throw std::invalid_argument("flow: bad r range");
  if (x_cells < 1) throw std::invalid_argument("flow: need at least one x cell");

  r_lo = std::min(r_lo, 0.0);
  r_hi = std::max(r_hi, 0.0);
  const auto steps_dn =
      static_cast<std::size_t>(std::ceil(-r_lo / h - 1e-12));
  const auto steps_up = static_cast<std::size_t>(std::ceil(r_hi / h - 1e-12));

  FlowTable table;
  table.sigma_ = sigma;
  table.rows_ = steps_dn + steps_up + 1;
  table.cols_ = x_cells + 1;
  table.dr_ = h;
  table.r0_ = -static_cast<double>(steps_dn) * h;
  table.x0_ = x_lo;
  table.dx_ = (x_hi - x_lo) / static_cast<double>(x_cells);
  table.F_.assign(table.rows_ * table.cols_, 0.0);
  table.P_.assign(table.rows_ * table.cols_, 0.0);

  const double center = 0.5 * (x_lo + x_hi);
  // Bounded sigma' lets the flow grow at most like exp(L |r|) from the
  // anchor row, so the 10x-width safety box is scaled by that allowance;
  // anything beyond it signals unsuitable inputs.
  const double r_span = std::max(-r_lo, r_hi);
  const double allowance =
      std::exp(std::min(sigma.derivative_bound * r_span, 30.0));
  const double safety = 5.0 * (x_hi - x_lo) * std::max(1.0, allowance);
  auto guard = [&](double F) {
    if (!std::isfinite(F) || std::fabs(F - center) > safety)
      throw FlowBlowUpError("flow left the safety box during tabulation");
  };

  const std::size_t anchor = steps_dn;
  for (std::size_t j = 0; j < table.cols_; ++j) {
    table.F_[anchor * table.cols_ + j] =
        x_lo + table.dx_ * static_cast<double>(j);
    table.P_[anchor * table.cols_ + j] = 1.0;
  }

  // Joint RK4 step of (F, P): F' = sigma(F), P' = sigma'(F) P.
  auto rk4_step = [&](double& F, double& P, double step) {
    const double k1F = sigma.value(F);
    const double k1P = sigma.d1(F) * P;
    const double F2 = F + 0.5 * step * k1F;
    const double k2F = sigma.value(F2);
    const double k2P = sigma.d1(F2) * (P + 0.5 * step * k1P);
    const double F3 = F + 0.5 * step * k2F;
    const double k3F = sigma.value(F3);
    const double k3P = sigma.d1(F3) * (P + 0.5 * step * k2P);
    const double F4 = F + step * k3F;
    const double k4F = sigma.value(F4);
    const double k4P = sigma.d1(F4) * (P + step * k3P);
    F += step / 6.0 * (k1F + 2.0 * (k2F + k3F) + k4F);
    P += step / 6.0 * (k1P + 2.0 * (k2P + k3P) + k4P);
    guard(F);
  };

  for (std::size_t i = anchor; i + 1 < table.rows_; ++i) {
    for (std::size_t j = 0; j < table.cols_; ++j) {
      double F = table.F_[i * table.cols_ + j];
      double P = table.P_[i * table.cols_ + j];
      rk4_step(F, P, h);
      table.F_[(i + 1) * table.cols_ + j] = F;
      table.P_[(i + 1) * table.cols_ + j] = P;
    }
  }
  for (std::size_t i = anchor; i > 0; --i) {
    for (std::size_t j = 0; j < table.cols_; ++j) {
      double F = table.F_[i * table.cols_ + j];
      double P = table.P_[i * table.cols_ + j];
      rk4_step(F, P, -h);
      table.F_[(i - 1) * table.cols_ + j] = F;
      table.P_[(i - 1) * table.cols_ + j] = P;
    }
  }

  for (double p : table.P_)
    if (!(p > 0.0))
      throw std::runtime_error("flow: dF/dx lost positivity; table unusable");
  for (std::size_t i = 0; i < table.rows_; ++i)
    for (std::size_t j = 0; j + 1 < table.cols_; ++j)
      if (!(table.F_[i * table.cols_ + j] < table.F_[i * table.cols_ + j + 1]))
        throw std::runtime_error("flow: rows lost monotonicity; table unusable");
  return table;
}

double check_inverse_pde(const FlowTable& flow, int samples,
                         std::uint64_t seed, double fd_step) {
  if (samples < 1)
    throw std::invalid_argument("check_inverse_pde: need at least one sample");
  const double d = fd_step;
  const double r_lo = flow.r_min() + 2 * d;
  const double r_hi = flow.r_max() - 2 * d;
  if (!(r_lo < r_hi))
    throw std::invalid_argument("check_inverse_pde: table too thin in r");
  const double w = flow.x_max() - flow.x_min();
  double worst = 0.0;
  int used = 0;
  for (int s = 0; s < samples; ++s) {
    const double r =
        r_lo + (r_hi - r_lo) * uniform01(seed, 2 * static_cast<std::uint64_t>(s));
    const double x = flow.x_min() + w * (0.2 + 0.6 * uniform01(seed, 2 * s + 1));
    try {
      const double y = flow.eval(r, x);
      const double dHdr =
          (flow.invert(r + d, y) - flow.invert(r - d, y)) / (2 * d);
      const double dHdy =
          (flow.invert(r, y + d) - flow.invert(r, y - d)) / (2 * d);
      worst = std::max(worst, std::fabs(dHdr + flow.sigma().value(y) * dHdy));
      ++used;
    } catch (const std::domain_error&) {
      // y +- d left the achieved range at this r; skip the sample.
    }
  }
  if (used == 0)
    throw std::runtime_error("check_inverse_pde: no usable interior samples");
  return worst;
}

// ---------------------------------------------------------------------------
// Doss-Sussmann solve

namespace {

struct RangeExit {
  double worst;
};

// RK4 for Y' = b(F(mu, Y), s) / P(mu, Y) on the path grid; mu is linearly
// interpolated at half steps.
std::vector<double> integrate_y(const FlowTable& flow, const Drift& b,
                                double y0, const SampledPath& mu) {
  const double margin = 2.0 * flow.x_step();
  const double y_lo = flow.x_min() + margin;
  const double y_hi = flow.x_max() - margin;
  auto rhs = [&](double s, double y) {
    if (y < y_lo || y > y_hi) throw RangeExit{y};
    const double r = mu.at(s);
    const double X = flow.eval(r, y);
    return b.value(X, s) / flow.eval_dx(r, y);
  };

  std::vector<double> y(mu.size());
  y[0] = y0;
  const double dt = mu.dt();
  for (std::size_t k = 0; k + 1 < mu.size(); ++k) {
    const double s = mu.t(k);
    const double k1 = rhs(s, y[k]);
    const double k2 = rhs(s + 0.5 * dt, y[k] + 0.5 * dt * k1);
    const double k3 = rhs(s + 0.5 * dt, y[k] + 0.5 * dt * k2);
    const double k4 = rhs(s + dt, y[k] + dt * k3);
    y[k + 1] = y[k] + dt / 6.0 * (k1 + 2.0 * (k2 + k3) + k4);
    if (y[k + 1] < y_lo || y[k + 1] > y_hi) throw RangeExit{y[k + 1]};
  }
  return y;
}

}  // namespace

namespace {

// Spot check of the declared growth bound |b(x,t)| <= K (1 + |x|) on the
// working box; a violated bound invalidates the range inference.
void check_drift_growth(const Drift& b, double x_lo, double x_hi, double t0,
                        double t1) {
  for (int i = 0; i <= 8; ++i) {
    const double x = x_lo + (x_hi - x_lo) * i / 8.0;
    for (double t : {t0, 0.5 * (t0 + t1), t1}) {
      if (std::fabs(b.value(x, t)) >
          b.linear_growth_K * (1.0 + std::fabs(x)) * (1.0 + 1e-9))
        throw std::invalid_argument(
            "solve_sde: drift exceeds its declared linear growth bound");
    }
  }
}

}  // namespace

SDESolution solve_sde(const Sigma& sigma, const Drift& b, double x0,
                      const SampledPath& mu, double h_flow,
                      std::size_t x_cells) {
  if (!b.value) throw std::invalid_argument("solve_sde: drift has no value");
  const double mu_lo = mu.min_value();
  const double mu_hi = mu.max_value();
  const double r_pad = std::max(0.25 * (mu_hi - mu_lo), 0.05);
  const double r_lo = mu_lo - r_pad;
  const double r_hi = mu_hi + r_pad;

  const double T = mu.t_end() - mu.t0();
  const double growth = std::exp(std::min(b.linear_growth_K * T, 8.0));
  double half_width =
      (1.0 + std::fabs(x0) + std::max(std::fabs(mu_lo), std::fabs(mu_hi))) *
      growth;

  SDEDiagnostics diag;
  for (int attempt = 0;; ++attempt) {
    check_drift_growth(b, x0 - half_width, x0 + half_width, mu.t0(),
                       mu.t_end());
    FlowTable flow = build_flow(sigma, r_lo, r_hi, x0 - half_width,
                                x0 + half_width, h_flow, x_cells);
    try {
      std::vector<double> y = integrate_y(flow, b, x0, mu);
      std::vector<double> x(y.size());
      double y_abs = 0.0;
      for (std::size_t k = 0; k < y.size(); ++k) {
        x[k] = flow.eval(mu[k], y[k]);
        y_abs = std::max(y_abs, std::fabs(y[k]));
      }
      diag.y_abs_max = y_abs;
      diag.r_lo = flow.r_min();
      diag.r_hi = flow.r_max();
      diag.x_lo = flow.x_min();
      diag.x_hi = flow.x_max();
      return SDESolution{SampledPath(mu.t0(), mu.dt(), std::move(x)),
                         SampledPath(mu.t0(), mu.dt(), std::move(y)),
                         std::move(flow), diag};
    } catch (const RangeExit& exit) {
      if (attempt >= 1)
        throw std::runtime_error(
            "solve_sde: solution left the widened flow box; inputs violate "
            "the growth assumptions");
      diag.flow_rebuilds = 1;
      half_width = 4.0 * std::max(half_width,
                                  std::fabs(exit.worst - x0) + 1.0);
    }
  }
}

double verify_solution_identity(const SDESolution& sol, const Sigma& sigma,
                                const Drift& b, const SampledPath& mu,
                                const ScalarField2& psi, const Partition& p) {
  if (!psi.value) throw std::invalid_argument("identity: psi has no value");
  const std::size_t n = mu.size();
  std::vector<double> z(n), z_sig(n), z_b(n), time(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double t = mu.t(k);
    const double X = sol.X[k];
    const double Z = psi.value(mu[k], X);
    z[k] = Z;
    z_sig[k] = Z * sigma.value(X);
    z_b[k] = Z * b.value(X, t);
    time[k] = t;
  }
  const SampledPath z_path(mu.t0(), mu.dt(), std::move(z));
  const SampledPath z_sig_path(mu.t0(), mu.dt(), std::move(z_sig));
  const SampledPath z_b_path(mu.t0(), mu.dt(), std::move(z_b));
  const SampledPath time_path(mu.t0(), mu.dt(), std::move(time));

  const double lhs = symmetric_sum(z_path, sol.X, p);
  const double rhs = symmetric_sum(z_sig_path, mu, p) +
                     stieltjes_integral(z_b_path, time_path, p);
  return std::fabs(lhs - rhs);
}

// ---------------------------------------------------------------------------
// Catalogs

Sigma sigma_catalog(std::string_view name, double c) {
  if (name == "const-sigma")
    return Sigma{[c](double) { return c; }, [](double) { return 0.0; },
                 [](double) { return 0.0; }, 0.0};
  if (name == "linear-sigma")
    return Sigma{[](double x) { return x; }, [](double) { return 1.0; },
                 [](double) { return 0.0; }, 1.0};
  if (name == "zero-sigma")
    return Sigma{[](double) { return 0.0; }, [](double) { return 0.0; },
                 [](double) { return 0.0; }, 0.0};
  throw std::invalid_argument("unknown sigma: " + std::string(name));
}

Drift drift_catalog(std::string_view name, double K) {
  if (name == "zero-drift")
    return Drift{[](double, double) { return 0.0; },
                 [](double) { return 0.0; }, 0.0};
  if (name == "unit-drift")
    return Drift{[](double, double) { return 1.0; },
                 [](double) { return 0.0; }, 1.0};
  if (name == "linear-drift")
    return Drift{[K](double x, double) { return K * x; },
                 [K](double) { return K; }, std::fabs(K)};
  if (name == "bounded-drift")
    return Drift{[K](double x, double) { return K * x / (1.0 + x * x); },
                 [K](double) { return std::fabs(K); }, std::fabs(K)};
  throw std::invalid_argument("unknown drift: " + std::string(name));
}

std::vector<std::string> sigma_catalog_names() {
  return {"const-sigma", "linear-sigma", "zero-sigma"};
}

std::vector<std::string> drift_catalog_names() {
  return {"zero-drift", "unit-drift", "linear-drift", "bounded-drift"};
}

}  // namespace smcalc
