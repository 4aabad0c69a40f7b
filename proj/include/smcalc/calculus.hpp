#pragma once

#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "smcalc/integration.hpp"
#include "smcalc/sm_core.hpp"

namespace smcalc {

inline constexpr double kDefaultQuadStep = 1e-3;

/// Scalar field f(x, v) with explicit analytic partial derivatives.
/// d2_dxx may be empty; operations that need it say so.
struct ScalarField2 {
  std::function<double(double, double)> value;
  std::function<double(double, double)> d_dx;
  std::function<double(double, double)> d_dv;
  std::function<double(double, double)> d2_dxx;  // optional
};

struct Box2 {
  double x_lo, x_hi;
  double v_lo, v_hi;
};

/// Max relative mismatch between the supplied first derivatives and central
/// finite differences over a sample grid on the box.
double max_derivative_mismatch(const ScalarField2& f, const Box2& box,
                               int samples_per_axis = 17);

/// True when the supplied derivatives match finite differences within tol.
bool validate_derivatives(const ScalarField2& f, const Box2& box,
                          double tol = 1e-4);

/// F(x, v) = integral_0^x f(y, v) dy by composite Simpson with panel width
/// <= step. F(0, v) == 0 exactly.
double antiderivative_eval(const ScalarField2& f, double x, double v,
                           double step = kDefaultQuadStep);

/// dF/dv (x, v) = integral_0^x (df/dv)(y, v) dy. Requires f.d_dv.
double antiderivative_dv(const ScalarField2& f, double x, double v,
                         double step = kDefaultQuadStep);

/// Right side of the change-of-variable identity for the midpoint integral:
///   F(mu_T, V_T) - F(mu_0, V_0) - integral F_v(mu_t, V_t) dV_t
/// with the Stieltjes term evaluated on partition p.
double chain_rule_rhs(const ScalarField2& f, const SampledPath& mu,
                      const SampledPath& V, const Partition& p,
                      double quad_step = kDefaultQuadStep);

struct ChainRuleCheck {
  ConvergenceReport lhs;
  double rhs = 0.0;
  double residual = 0.0;
  bool pass = false;
};

/// Left side: refinement of the midpoint sums of f(mu, V) against mu.
/// Right side: chain_rule_rhs on the finest partition.
ChainRuleCheck verify_chain_rule(const ScalarField2& f, const SampledPath& mu,
                                 const SampledPath& V,
                                 std::span<const Partition> refinement,
                                 double tol,
                                 double quad_step = kDefaultQuadStep);

struct SubstitutionCheck {
  ConvergenceReport lhs;
  double rhs = 0.0;
  double residual = 0.0;
  bool pass = false;
};

/// Checks that integrating f(mu,V) against the composed path g(mu_t, V_t)
/// matches integrating f*g_x against mu plus the Stieltjes term f*g_v dV.
/// Requires g.d2_dxx.
SubstitutionCheck verify_substitution_rule(const ScalarField2& f,
                                           const ScalarField2& g,
                                           const SampledPath& mu,
                                           const SampledPath& V,
                                           std::span<const Partition> refinement,
                                           double tol);

/// Built-in fields addressable by name: "unit" (1), "linear" (x),
/// "quadratic" (x^2), "bilinear" (x v), "sin-shift" (sin x + v),
/// "coord-v" (v), "identity-g" (x), "square-g" (x^2 + v).
const ScalarField2& field_catalog(std::string_view name);
std::vector<std::string> field_catalog_names();

}  // namespace smcalc
