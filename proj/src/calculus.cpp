#include "smcalc/calculus.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

#include "smcalc/compensated.hpp"
#include "smcalc/quadrature.hpp"

namespace smcalc {

double max_derivative_mismatch(const ScalarField2& f, const Box2& box,
                               int samples_per_axis) {
  if (!f.value || !f.d_dx || !f.d_dv)
    throw std::invalid_argument("field: value, d_dx and d_dv are required");
  if (samples_per_axis < 2)
    throw std::invalid_argument("field validation: need >= 2 samples per axis");

  const int n = samples_per_axis;
  double worst = 0.0;
  for (int ix = 0; ix < n; ++ix) {
    const double x = box.x_lo + (box.x_hi - box.x_lo) * ix / (n - 1.0);
    for (int iv = 0; iv < n; ++iv) {
      const double v = box.v_lo + (box.v_hi - box.v_lo) * iv / (n - 1.0);
      const double hx = 1e-5 * std::max(1.0, std::fabs(x));
      const double hv = 1e-5 * std::max(1.0, std::fabs(v));
      const double fd_x = (f.value(x + hx, v) - f.value(x - hx, v)) / (2 * hx);
      const double fd_v = (f.value(x, v + hv) - f.value(x, v - hv)) / (2 * hv);
      const double ex =
          std::fabs(fd_x - f.d_dx(x, v)) / std::max(1.0, std::fabs(f.d_dx(x, v)));
      const double ev =
          std::fabs(fd_v - f.d_dv(x, v)) / std::max(1.0, std::fabs(f.d_dv(x, v)));
      worst = std::max({worst, ex, ev});
    }
  }
  return worst;
}

bool validate_derivatives(const ScalarField2& f, const Box2& box, double tol) {
  return max_derivative_mismatch(f, box) <= tol;
}

double antiderivative_eval(const ScalarField2& f, double x, double v,
                           double step) {
  if (!f.value) throw std::invalid_argument("antiderivative: field has no value");
  if (x == 0.0) return 0.0;
  return composite_simpson_step([&](double y) { return f.value(y, v); }, 0.0,
                                x, step);
}

double antiderivative_dv(const ScalarField2& f, double x, double v,
                         double step) {
  if (!f.d_dv)
    throw std::invalid_argument("antiderivative_dv: field has no d_dv");
  if (x == 0.0) return 0.0;
  return composite_simpson_step([&](double y) { return f.d_dv(y, v); }, 0.0, x,
                                step);
}

double chain_rule_rhs(const ScalarField2& f, const SampledPath& mu,
                      const SampledPath& V, const Partition& p,
                      double quad_step) {
  if (!f.d_dv)
    throw std::invalid_argument("chain_rule_rhs: field must carry d_dv");
  const double t_end = p.back();
  const double t_start = p.front();
  const double F_end =
      antiderivative_eval(f, mu.at(t_end), V.at(t_end), quad_step);
  const double F_start =
      antiderivative_eval(f, mu.at(t_start), V.at(t_start), quad_step);
  const double dv_term = stieltjes_integral(
      [&](double t) { return antiderivative_dv(f, mu.at(t), V.at(t), quad_step); },
      V, p);
  return F_end - F_start - dv_term;
}

namespace {

SampledPath composed_path(const ScalarField2& f, const SampledPath& mu,
                          const SampledPath& V) {
  std::vector<double> values(mu.size());
  for (std::size_t k = 0; k < mu.size(); ++k)
    values[k] = f.value(mu[k], V.at(mu.t(k)));
  return SampledPath(mu.t0(), mu.dt(), std::move(values));
}

}  // namespace

ChainRuleCheck verify_chain_rule(const ScalarField2& f, const SampledPath& mu,
                                 const SampledPath& V,
                                 std::span<const Partition> refinement,
                                 double tol, double quad_step) {
  ChainRuleCheck out;
  const SampledPath xi = composed_path(f, mu, V);
  out.lhs = symmetric_integral(xi, mu, refinement, tol);
  out.rhs = chain_rule_rhs(f, mu, V, refinement.back(), quad_step);
  out.residual = std::fabs(out.lhs.extrapolated_value - out.rhs);
  out.pass = out.residual < tol && out.lhs.converged;
  return out;
}

SubstitutionCheck verify_substitution_rule(const ScalarField2& f,
                                           const ScalarField2& g,
                                           const SampledPath& mu,
                                           const SampledPath& V,
                                           std::span<const Partition> refinement,
                                           double tol) {
  if (!g.d2_dxx)
    throw std::invalid_argument("substitution: g must carry d2_dxx");

  const SampledPath xi = composed_path(f, mu, V);

  std::vector<double> eta(mu.size()), fg1(mu.size()), fg2(mu.size());
  for (std::size_t k = 0; k < mu.size(); ++k) {
    const double x = mu[k];
    const double v = V.at(mu.t(k));
    const double fv = f.value(x, v);
    eta[k] = g.value(x, v);
    fg1[k] = fv * g.d_dx(x, v);
    fg2[k] = fv * g.d_dv(x, v);
  }
  const SampledPath eta_path(mu.t0(), mu.dt(), std::move(eta));
  const SampledPath fg1_path(mu.t0(), mu.dt(), std::move(fg1));
  const SampledPath fg2_path(mu.t0(), mu.dt(), std::move(fg2));

  SubstitutionCheck out;
  out.lhs = symmetric_integral(xi, eta_path, refinement, tol);
  const ConvergenceReport mu_part =
      symmetric_integral(fg1_path, mu, refinement, tol);
  const double v_part = stieltjes_integral(fg2_path, V, refinement.back());
  out.rhs = mu_part.extrapolated_value + v_part;
  out.residual = std::fabs(out.lhs.extrapolated_value - out.rhs);
  out.pass = out.residual < tol && out.lhs.converged;
  return out;
}

// ---------------------------------------------------------------------------
// Field catalog

namespace {

std::map<std::string, ScalarField2, std::less<>> make_catalog() {
  std::map<std::string, ScalarField2, std::less<>> cat;
  auto zero = [](double, double) { return 0.0; };
  auto one = [](double, double) { return 1.0; };
  cat["unit"] = {one, zero, zero, zero};
  cat["linear"] = {[](double x, double) { return x; }, one, zero, zero};
  cat["quadratic"] = {[](double x, double) { return x * x; },
                      [](double x, double) { return 2.0 * x; }, zero,
                      [](double, double) { return 2.0; }};
  cat["bilinear"] = {[](double x, double v) { return x * v; },
                     [](double, double v) { return v; },
                     [](double x, double) { return x; }, zero};
  cat["sin-shift"] = {[](double x, double v) { return std::sin(x) + v; },
                      [](double x, double) { return std::cos(x); }, one,
                      [](double x, double) { return -std::sin(x); }};
  cat["coord-v"] = {[](double, double v) { return v; }, zero, one, zero};
  cat["identity-g"] = {[](double x, double) { return x; }, one, zero, zero};
  cat["square-g"] = {[](double x, double v) { return x * x + v; },
                     [](double x, double) { return 2.0 * x; }, one,
                     [](double, double) { return 2.0; }};
  return cat;
}

const std::map<std::string, ScalarField2, std::less<>>& catalog() {
  static const auto cat = make_catalog();
  return cat;
}

}  // namespace

const ScalarField2& field_catalog(std::string_view name) {
  const auto& cat = catalog();
  const auto it = cat.find(name);
  if (it == cat.end())
    throw std::invalid_argument("unknown field: " + std::string(name));
  return it->second;
}

std::vector<std::string> field_catalog_names() {
  std::vector<std::string> names;
  for (const auto& [name, field] : catalog()) names.push_back(name);
  return names;
}

}  // namespace smcalc
