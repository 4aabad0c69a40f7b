#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "smcalc/calculus.hpp"
#include "smcalc/integration.hpp"
#include "smcalc/sm_core.hpp"

namespace smcalc {

/// Diffusion coefficient with bounded first and second derivatives.
struct Sigma {
  std::function<double(double)> value;
  std::function<double(double)> d1;
  std::function<double(double)> d2;
  double derivative_bound = 1.0;
};

/// Drift b(x, t): locally Lipschitz in x with linear growth
/// |b(x,t)| <= K (1 + |x|).
struct Drift {
  std::function<double(double, double)> value;
  std::function<double(double)> lipschitz_of_box;
  double linear_growth_K = 1.0;
};

/// Thrown when the flow leaves the safety box during tabulation (10x wider
/// than the requested x-range); signals unsuitable inputs.
class FlowBlowUpError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Tabulated solution F(r, x) of dF/dr = sigma(F), F(0, x) = x, together
/// with dF/dx from the variational equation d(dF/dx)/dr = sigma'(F) dF/dx.
///
/// Rows are the RK4 steps in r (r = 0 is always a node); columns are a
/// uniform x grid. Evaluation interpolates linearly in x and with a cubic
/// Hermite in r, using dF/dr = sigma(F) at the bracketing rows, keeping
/// the table C^1 in r and O(h^4) accurate between rows.
class FlowTable {
 public:
  double eval(double r, double x) const;
  double eval_dx(double r, double x) const;
  /// H(r, y): the x with F(r, x) = y, by bisection on the monotone row plus
  /// a final derivative correction. Throws std::domain_error when y is
  /// outside the achieved range at r.
  double invert(double r, double y) const;

  double r_min() const { return r0_; }
  double r_max() const { return r0_ + dr_ * static_cast<double>(rows_ - 1); }
  double x_min() const { return x0_; }
  double x_max() const { return x0_ + dx_ * static_cast<double>(cols_ - 1); }
  double r_step() const { return dr_; }
  double x_step() const { return dx_; }
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  const Sigma& sigma() const { return sigma_; }

 private:
  friend FlowTable build_flow(const Sigma&, double, double, double, double,
                              double, std::size_t);
  double node_F(std::size_t i, std::size_t j) const {
    return F_[i * cols_ + j];
  }
  double node_P(std::size_t i, std::size_t j) const {
    return P_[i * cols_ + j];
  }

  Sigma sigma_;
  double r0_ = 0.0, dr_ = 0.0;
  double x0_ = 0.0, dx_ = 0.0;
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<double> F_;
  std::vector<double> P_;
};

/// Solves the flow and its x-derivative by classical RK4 with fixed step h
/// in r, from r = 0 outward over [r_lo, r_hi] (widened to contain 0).
FlowTable build_flow(const Sigma& sigma, double r_lo, double r_hi,
                     double x_lo, double x_hi, double h,
                     std::size_t x_cells = 256);

/// Max finite-difference residual of dH/dr + sigma(y) dH/dy at `samples`
/// random interior points of the table.
double check_inverse_pde(const FlowTable& flow, int samples,
                         std::uint64_t seed = 1, double fd_step = 1e-4);

struct SDEDiagnostics {
  int flow_rebuilds = 0;
  double y_abs_max = 0.0;
  double r_lo = 0.0, r_hi = 0.0;
  double x_lo = 0.0, x_hi = 0.0;
};

struct SDESolution {
  SampledPath X;
  SampledPath Y;
  FlowTable flow;
  SDEDiagnostics diagnostics;
};

/// Doss-Sussmann solution of  dX = sigma(X) o dmu + b(X, t) dt, X_0 = x0:
/// tabulates the flow on a box inferred from the mu range and x0, solves
/// the pathwise ODE  Y' = b(F(mu, Y), t) / (dF/dx)(mu, Y)  by RK4 on mu's
/// grid (mu piecewise linear at stage points), and sets X_k = F(mu_k, Y_k).
/// If Y leaves the box the flow is rebuilt once on a wider box; a second
/// escape is an error.
SDESolution solve_sde(const Sigma& sigma, const Drift& b, double x0,
                      const SampledPath& mu, double h_flow = 1e-3,
                      std::size_t x_cells = 256);

/// Residual of the defining integral identity on partition p with test
/// process Z_t = psi(mu_t, X_t):
///   | sum Z o dX  -  sum Z sigma(X) o dmu  -  int Z b(X, t) dt |.
double verify_solution_identity(const SDESolution& sol, const Sigma& sigma,
                                const Drift& b, const SampledPath& mu,
                                const ScalarField2& psi, const Partition& p);

/// Built-in coefficients: "const-sigma" (c), "linear-sigma" (x),
/// "zero-sigma"; "zero-drift", "unit-drift", "linear-drift" (x),
/// "bounded-drift" (K x / (1 + x^2)).
Sigma sigma_catalog(std::string_view name, double c = 1.0);
Drift drift_catalog(std::string_view name, double K = 1.0);
std::vector<std::string> sigma_catalog_names();
std::vector<std::string> drift_catalog_names();

}  // namespace smcalc
