// smcalc: experiments with symmetric (midpoint) integration driven by random
// Fourier-series stochastic measures.
//
// Every subcommand echoes its fully resolved configuration into the output,
// so each artifact is self-describing and re-runnable. Exit codes:
//   0  success / verification passed
//   1  a verification failed (residual above tolerance, inequality violated)
//   2  usage, domain or resource errors

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <numbers>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "smcalc/calculus.hpp"
#include "smcalc/counterexamples.hpp"
#include "smcalc/integration.hpp"
#include "smcalc/sde.hpp"
#include "smcalc/serialize.hpp"
#include "smcalc/sm_core.hpp"

namespace fs = std::filesystem;
using smcalc::json;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi_v<double>;

struct CommonOpts {
  std::string profile = "[[1,8]]";
  std::uint64_t seed = 1;
  std::string out_dir;
  unsigned threads = 1;
  std::string config_file;
};

void add_common(CLI::App* cmd, CommonOpts& c) {
  cmd->add_option("--profile", c.profile,
                  "mode profile as a JSON array of [m,n] pairs (-1 = unbounded)");
  cmd->add_option("--seed", c.seed, "sign sequence seed");
  cmd->add_option("--out-dir", c.out_dir,
                  "output directory (default: $SMCALC_OUT or .)");
  cmd->add_option("--threads", c.threads, "worker cap for long summations");
  cmd->add_option("--config", c.config_file,
                  "JSON config file; explicit flags win over file values");
}

fs::path resolve_out_dir(const CommonOpts& c) {
  if (!c.out_dir.empty()) return c.out_dir;
  if (const char* env = std::getenv("SMCALC_OUT")) return env;
  return ".";
}

// Values from --config fill any option the user did not pass on the command
// line. Flags always win.
void apply_config_file(CLI::App* cmd, const std::string& file) {
  if (file.empty()) return;
  const json cfg = smcalc::read_json_file(file);
  if (!cfg.is_object())
    throw std::invalid_argument("config file must hold a JSON object");
  for (const auto& [key, value] : cfg.items()) {
    CLI::Option* opt = cmd->get_option_no_throw("--" + key);
    if (opt == nullptr || opt->count() > 0) continue;
    if (value.is_array() && !value.empty() && !value[0].is_array()) {
      for (const auto& item : value)
        opt->add_result(item.is_string() ? item.get<std::string>()
                                         : item.dump());
    } else {
      opt->add_result(value.is_string() ? value.get<std::string>()
                                        : value.dump());
    }
    opt->run_callback();
  }
}

std::string timestamp() {
  const auto now = std::chrono::system_clock::now();
  const auto t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::strftime(buf, sizeof buf, "%FT%TZ", std::gmtime(&t));
  return buf;
}

// "generated_at" is informational only; determinism comparisons drop it.
json output_skeleton(const json& config) {
  return json{{"config", config}, {"generated_at", timestamp()}};
}

smcalc::CoefficientProfile parse_profile(const std::string& text) {
  return smcalc::profile_from_json(json::parse(text));
}

std::vector<smcalc::Partition> mesh_partitions(double T,
                                               const std::vector<std::uint64_t>& js) {
  std::vector<smcalc::Partition> parts;
  for (auto j : js) parts.push_back(smcalc::Partition::uniform(T, j));
  return parts;
}

smcalc::SampledPath v_path_by_name(const std::string& name, double T) {
  const std::size_t n = 1025;
  const double dt = T / static_cast<double>(n - 1);
  if (name == "zero")
    return smcalc::SampledPath::from_function(0.0, dt, n, [](double) { return 0.0; });
  if (name == "t")
    return smcalc::SampledPath::from_function(0.0, dt, n, [](double t) { return t; });
  if (name == "half-t")
    return smcalc::SampledPath::from_function(0.0, dt, n,
                                              [](double t) { return 0.5 * t; });
  throw std::invalid_argument("unknown v-path (want zero, t or half-t): " + name);
}

// ---------------------------------------------------------------------------

int run_sample_path(const CommonOpts& c, std::uint64_t points, double horizon,
                    std::uint64_t max_index, int levels) {
  const auto profile = parse_profile(c.profile);
  smcalc::TruncationPolicy trunc;
  trunc.max_index = max_index;
  const smcalc::FourierSM sm(profile, c.seed, trunc, horizon);
  const double dt = horizon / static_cast<double>(points - 1);
  const auto path = sm.sample_path(0.0, dt, points);

  const json config{{"subcommand", "sample-path"},
                    {"profile", smcalc::profile_to_json(profile)},
                    {"seed", c.seed},
                    {"points", points},
                    {"horizon", horizon},
                    {"max_index", max_index},
                    {"levels", levels}};
  const fs::path dir = resolve_out_dir(c);
  fs::create_directories(dir);
  smcalc::write_path_csv(path, dir / "path.csv", config);

  json out = output_skeleton(config);
  out["path_csv"] = (dir / "path.csv").string();
  out["tail_bound"] = sm.path_tail_bound();
  if (levels > 0) {
    const auto diag = smcalc::holder_diagnostic(path, levels);
    json table = json::array();
    for (const auto& [scale, inc] : diag.scale_table)
      table.push_back(json::array({scale, inc}));
    out["holder"] = {{"gamma_hat", diag.defined ? json(diag.gamma_hat) : json()},
                     {"defined", diag.defined},
                     {"scale_table", std::move(table)}};
  }
  smcalc::write_json_file(out, dir / "sample-path.json");
  std::cout << out.dump(2) << "\n";
  return 0;
}

int run_sym_integral(const CommonOpts& c, const std::string& xi_name,
                     const std::string& v_name, double T,
                     const std::vector<std::uint64_t>& meshes, double tol,
                     std::uint64_t grid_points) {
  const auto profile = parse_profile(c.profile);
  const smcalc::FourierSM sm(profile, c.seed, {}, std::max(T, kTwoPi));
  const double dt = T / static_cast<double>(grid_points);
  const auto mu = sm.sample_path(0.0, dt, grid_points + 1);
  const auto parts = mesh_partitions(T, meshes);

  smcalc::ConvergenceReport report;
  if (xi_name == "eta") {
    report = smcalc::symmetric_integral(mu, mu, parts, tol);
  } else if (xi_name == "one") {
    const auto ones = smcalc::SampledPath::from_function(
        0.0, T / 4.0, 5, [](double) { return 1.0; });
    report = smcalc::symmetric_integral(ones, mu, parts, tol);
  } else {
    const auto& field = smcalc::field_catalog(xi_name);
    const auto V = v_path_by_name(v_name, T);
    std::vector<double> xi_vals(mu.size());
    for (std::size_t k = 0; k < mu.size(); ++k)
      xi_vals[k] = field.value(mu[k], V.at(mu.t(k)));
    report = smcalc::symmetric_integral(
        smcalc::SampledPath(0.0, dt, std::move(xi_vals)), mu, parts, tol);
  }

  const json config{{"subcommand", "sym-integral"},
                    {"profile", smcalc::profile_to_json(profile)},
                    {"seed", c.seed},         {"xi", xi_name},
                    {"v_path", v_name},       {"T", T},
                    {"meshes", meshes},       {"tol", tol},
                    {"grid_points", grid_points}};
  const fs::path dir = resolve_out_dir(c);
  fs::create_directories(dir);
  smcalc::write_table_csv(report.estimates, "mesh,sum", dir / "sym-integral.csv",
                          config);
  json out = output_skeleton(config);
  out["report"] = smcalc::report_to_json(report);
  smcalc::write_json_file(out, dir / "sym-integral.json");
  std::cout << out.dump(2) << "\n";
  return report.converged ? 0 : 1;
}

int run_chain_rule(const CommonOpts& c, const std::string& field_name,
                   const std::string& v_name, double T,
                   const std::vector<std::uint64_t>& meshes, double tol,
                   std::uint64_t grid_points, double quad_step) {
  const auto profile = parse_profile(c.profile);
  const smcalc::FourierSM sm(profile, c.seed, {}, std::max(T, kTwoPi));
  const auto mu = sm.sample_path(0.0, T / static_cast<double>(grid_points),
                                 grid_points + 1);
  const auto V = v_path_by_name(v_name, T);
  const auto parts = mesh_partitions(T, meshes);
  const auto check = smcalc::verify_chain_rule(smcalc::field_catalog(field_name),
                                               mu, V, parts, tol, quad_step);

  const json config{{"subcommand", "chain-rule"},
                    {"profile", smcalc::profile_to_json(profile)},
                    {"seed", c.seed},     {"field", field_name},
                    {"v_path", v_name},   {"T", T},
                    {"meshes", meshes},   {"tol", tol},
                    {"grid_points", grid_points}, {"quad_step", quad_step}};
  json out = output_skeleton(config);
  out["lhs"] = smcalc::report_to_json(check.lhs);
  out["rhs"] = check.rhs;
  out["residual"] = check.residual;
  out["pass"] = check.pass;
  const fs::path dir = resolve_out_dir(c);
  fs::create_directories(dir);
  smcalc::write_json_file(out, dir / "chain-rule.json");
  std::cout << out.dump(2) << "\n";
  return check.residual < tol ? 0 : 1;
}

int run_substitution(const CommonOpts& c, const std::string& field_name,
                     const std::string& g_name, const std::string& v_name,
                     double T, const std::vector<std::uint64_t>& meshes,
                     double tol, std::uint64_t grid_points) {
  const auto profile = parse_profile(c.profile);
  const smcalc::FourierSM sm(profile, c.seed, {}, std::max(T, kTwoPi));
  const auto mu = sm.sample_path(0.0, T / static_cast<double>(grid_points),
                                 grid_points + 1);
  const auto V = v_path_by_name(v_name, T);
  const auto parts = mesh_partitions(T, meshes);
  const auto check = smcalc::verify_substitution_rule(
      smcalc::field_catalog(field_name), smcalc::field_catalog(g_name), mu, V,
      parts, tol);

  const json config{{"subcommand", "substitution-rule"},
                    {"profile", smcalc::profile_to_json(profile)},
                    {"seed", c.seed},   {"field", field_name},
                    {"g", g_name},      {"v_path", v_name},
                    {"T", T},           {"meshes", meshes},
                    {"tol", tol},       {"grid_points", grid_points}};
  json out = output_skeleton(config);
  out["lhs"] = smcalc::report_to_json(check.lhs);
  out["rhs"] = check.rhs;
  out["residual"] = check.residual;
  out["pass"] = check.pass;
  const fs::path dir = resolve_out_dir(c);
  fs::create_directories(dir);
  smcalc::write_json_file(out, dir / "substitution-rule.json");
  std::cout << out.dump(2) << "\n";
  return check.residual < tol ? 0 : 1;
}

int run_nvar(const CommonOpts& c, int order, std::vector<double> eps_list,
             double T1, std::uint64_t grid_points) {
  const auto profile = parse_profile(c.profile);
  std::sort(eps_list.begin(), eps_list.end(), std::greater<>());
  const double horizon = T1 + eps_list.front() + 0.05;
  const smcalc::FourierSM sm(profile, c.seed, {}, horizon);
  const auto path = sm.sample_path(
      0.0, horizon / static_cast<double>(grid_points), grid_points + 1);

  std::vector<std::pair<double, double>> rows;
  for (double eps : eps_list)
    rows.emplace_back(eps,
                      smcalc::strong_variation_estimate(path, order, eps, T1));

  const json config{{"subcommand", "nvar"},
                    {"profile", smcalc::profile_to_json(profile)},
                    {"seed", c.seed}, {"order", order},
                    {"eps", eps_list}, {"T1", T1},
                    {"grid_points", grid_points}};
  const fs::path dir = resolve_out_dir(c);
  fs::create_directories(dir);
  smcalc::write_table_csv(rows, "eps,estimate", dir / "nvar.csv", config);
  json out = output_skeleton(config);
  json estimates = json::array();
  for (const auto& [eps, value] : rows)
    estimates.push_back(json::array({eps, value}));
  out["estimates"] = std::move(estimates);
  smcalc::write_json_file(out, dir / "nvar.json");
  std::cout << out.dump(2) << "\n";
  return 0;
}

int run_sde(const CommonOpts& c, const std::string& sigma_name, double sigma_c,
            const std::string& drift_name, double drift_k, double x0, double T,
            std::uint64_t grid_points, double flow_step, bool verify,
            const std::string& psi_name, std::uint64_t mesh, double tol) {
  const auto profile = parse_profile(c.profile);
  const smcalc::FourierSM sm(profile, c.seed, {}, std::max(T, kTwoPi));
  const auto mu = sm.sample_path(0.0, T / static_cast<double>(grid_points),
                                 grid_points + 1);
  const auto sigma = smcalc::sigma_catalog(sigma_name, sigma_c);
  const auto drift = smcalc::drift_catalog(drift_name, drift_k);
  const auto sol = smcalc::solve_sde(sigma, drift, x0, mu, flow_step);

  json config{{"subcommand", verify ? "sde-verify" : "sde-solve"},
              {"profile", smcalc::profile_to_json(profile)},
              {"seed", c.seed},       {"sigma", sigma_name},
              {"sigma_c", sigma_c},   {"drift", drift_name},
              {"drift_k", drift_k},   {"x0", x0},
              {"T", T},               {"grid_points", grid_points},
              {"flow_step", flow_step}};
  const fs::path dir = resolve_out_dir(c);
  fs::create_directories(dir);
  smcalc::write_path_csv(sol.X, dir / "X.csv", config);
  smcalc::write_path_csv(sol.Y, dir / "Y.csv", config);

  json out = output_skeleton(config);
  out["diagnostics"] = {{"flow_rebuilds", sol.diagnostics.flow_rebuilds},
                        {"y_abs_max", sol.diagnostics.y_abs_max},
                        {"r_range", {sol.diagnostics.r_lo, sol.diagnostics.r_hi}},
                        {"x_range", {sol.diagnostics.x_lo, sol.diagnostics.x_hi}}};

  int exit_code = 0;
  if (verify) {
    config["psi"] = psi_name;
    config["mesh"] = mesh;
    config["tol"] = tol;
    out["config"] = config;
    const auto fine = smcalc::Partition::uniform(T, mesh);
    const auto coarse = smcalc::Partition::uniform(T, std::max<std::uint64_t>(mesh / 16, 2));
    const double res = smcalc::verify_solution_identity(
        sol, sigma, drift, mu, smcalc::field_catalog(psi_name), fine);
    const double res_coarse = smcalc::verify_solution_identity(
        sol, sigma, drift, mu, smcalc::field_catalog(psi_name), coarse);
    out["residual"] = res;
    out["residual_coarse"] = res_coarse;
    out["pass"] = res < tol;
    exit_code = res < tol ? 0 : 1;
  }
  smcalc::write_json_file(out, dir / (verify ? "sde-verify.json" : "sde-solve.json"));
  std::cout << out.dump(2) << "\n";
  return exit_code;
}

int run_parseval(const CommonOpts& c, double eps, std::uint64_t M) {
  const auto r = smcalc::parseval_check(eps, M, c.threads);
  const double abs_err = std::fabs(r.partial_sum - r.target);
  const json config{{"subcommand", "parseval"}, {"eps", eps}, {"M", M}};
  json out = output_skeleton(config);
  out["partial_sum"] = r.partial_sum;
  out["tail_bound"] = r.tail_bound;
  out["target"] = r.target;
  out["abs_err"] = abs_err;
  out["pass"] = abs_err <= r.tail_bound + 1e-9;
  const fs::path dir = resolve_out_dir(c);
  fs::create_directories(dir);
  smcalc::write_json_file(out, dir / "parseval.json");
  std::cout << out.dump(2) << "\n";
  return abs_err <= r.tail_bound + 1e-9 ? 0 : 1;
}

int run_counterexample1(const CommonOpts& c, int depth, double margin,
                        const std::string& check_file) {
  const fs::path dir = resolve_out_dir(c);
  fs::create_directories(dir);
  if (!check_file.empty()) {
    const auto cert =
        smcalc::oscillator1_from_json(smcalc::read_json_file(check_file));
    const bool ok = smcalc::reverify(cert);
    std::cout << (ok ? "certificate verified\n" : "certificate REJECTED\n");
    return ok ? 0 : 1;
  }
  const auto cert = smcalc::construct_oscillator1(depth, margin,
                                                  smcalc::SearchBudget{},
                                                  c.threads);
  const json config{{"subcommand", "counterexample1"},
                    {"depth", depth},
                    {"margin", margin}};
  json out = output_skeleton(config);
  out["certificate"] = smcalc::certificate_to_json(cert);
  out["verified"] = smcalc::reverify(cert);
  smcalc::write_json_file(out["certificate"], dir / "oscillator1.json");
  smcalc::write_json_file(out, dir / "counterexample1.json");
  std::cout << out.dump(2) << "\n";
  return out["verified"].get<bool>() ? 0 : 1;
}

int run_counterexample2(const CommonOpts& c, int depth, int seeds,
                        double margin, const std::string& check_file) {
  const fs::path dir = resolve_out_dir(c);
  fs::create_directories(dir);
  if (!check_file.empty()) {
    const auto cert =
        smcalc::oscillator2_from_json(smcalc::read_json_file(check_file));
    const bool ok = smcalc::reverify(cert);
    std::cout << (ok ? "certificate verified\n" : "certificate REJECTED\n");
    return ok ? 0 : 1;
  }
  const auto cert = smcalc::construct_oscillator2(depth, seeds, margin,
                                                  smcalc::SearchBudget{},
                                                  c.threads);
  const json config{{"subcommand", "counterexample2"},
                    {"depth", depth},
                    {"seeds", seeds},
                    {"margin", margin}};
  json out = output_skeleton(config);
  out["certificate"] = smcalc::certificate_to_json(cert);
  out["verified"] = smcalc::reverify(cert);
  smcalc::write_json_file(out["certificate"], dir / "oscillator2.json");
  smcalc::write_json_file(out, dir / "counterexample2.json");
  std::cout << out.dump(2) << "\n";
  return out["verified"].get<bool>() ? 0 : 1;
}

int run_quantile(const CommonOpts& c, const std::string& experiment,
                 unsigned level, double eps, int order, int seeds, double q,
                 std::uint64_t grid_points) {
  const auto profile = parse_profile(c.profile);
  std::function<double(std::uint64_t)> fn;
  if (experiment == "sum-squared-increments") {
    fn = [&](std::uint64_t s) {
      const smcalc::FourierSM sm(profile, s);
      return smcalc::sum_squared_increments(
          sm, smcalc::Partition::dyadic(kTwoPi, level));
    };
  } else if (experiment == "nvar") {
    fn = [&](std::uint64_t s) {
      const double horizon = kTwoPi + eps + 0.05;
      const smcalc::FourierSM sm(profile, s, {}, horizon);
      const auto path = sm.sample_path(
          0.0, horizon / static_cast<double>(grid_points), grid_points + 1);
      return smcalc::strong_variation_estimate(path, order, eps, kTwoPi);
    };
  } else {
    throw std::invalid_argument(
        "unknown experiment (want sum-squared-increments or nvar): " +
        experiment);
  }
  const double value = smcalc::boundedness_quantile(fn, seeds, q, c.threads);

  const json config{{"subcommand", "quantile"},
                    {"profile", smcalc::profile_to_json(profile)},
                    {"experiment", experiment}, {"level", level},
                    {"eps", eps},               {"order", order},
                    {"seeds", seeds},           {"q", q},
                    {"grid_points", grid_points}};
  json out = output_skeleton(config);
  out["quantile"] = value;
  const fs::path dir = resolve_out_dir(c);
  fs::create_directories(dir);
  smcalc::write_json_file(out, dir / "quantile.json");
  std::cout << out.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"numerical experiments with stochastic-measure integration"};
  app.require_subcommand(1);

  CommonOpts common;

  // sample-path
  auto* sp = app.add_subcommand("sample-path", "sample a measure path to CSV");
  std::uint64_t sp_points = 4097;
  double sp_horizon = kTwoPi;
  std::uint64_t sp_max_index = std::uint64_t{1} << 16;
  int sp_levels = 0;
  add_common(sp, common);
  sp->add_option("--points", sp_points, "grid point count");
  sp->add_option("--horizon", sp_horizon, "time horizon");
  sp->add_option("--max-index", sp_max_index, "truncation index for unbounded profiles");
  sp->add_option("--holder-levels", sp_levels, "also run the scaling diagnostic");

  // sym-integral
  auto* si = app.add_subcommand("sym-integral", "refinement of midpoint sums");
  std::string si_xi = "eta", si_v = "zero";
  double si_T = kTwoPi, si_tol = smcalc::kDefaultConvergenceTol;
  std::vector<std::uint64_t> si_meshes = {256, 1024, 4096};
  std::uint64_t si_grid = 4096;
  add_common(si, common);
  si->add_option("--xi", si_xi, "integrand: eta, one, or a field name");
  si->add_option("--v-path", si_v, "second field argument: zero, t, half-t");
  si->add_option("--T", si_T, "integration horizon");
  si->add_option("--meshes", si_meshes, "uniform partition sizes (decreasing mesh)");
  si->add_option("--tol", si_tol, "convergence tolerance");
  si->add_option("--grid-points", si_grid, "path grid intervals");

  // chain-rule
  auto* cr = app.add_subcommand("chain-rule", "check the change-of-variable identity");
  std::string cr_field = "quadratic", cr_v = "zero";
  double cr_T = kTwoPi, cr_tol = 1e-2, cr_step = smcalc::kDefaultQuadStep;
  std::vector<std::uint64_t> cr_meshes = {256, 1024, 4096};
  std::uint64_t cr_grid = 4096;
  add_common(cr, common);
  cr->add_option("--field", cr_field, "integrand field name");
  cr->add_option("--v-path", cr_v, "drift path: zero, t, half-t");
  cr->add_option("--T", cr_T, "horizon");
  cr->add_option("--meshes", cr_meshes, "partition sizes");
  cr->add_option("--tol", cr_tol, "residual tolerance");
  cr->add_option("--grid-points", cr_grid, "path grid intervals");
  cr->add_option("--quad-step", cr_step, "antiderivative quadrature step");

  // substitution-rule
  auto* sr = app.add_subcommand("substitution-rule",
                                "check integration against a composed path");
  std::string sr_field = "linear", sr_g = "square-g", sr_v = "t";
  double sr_T = kTwoPi, sr_tol = 1e-2;
  std::vector<std::uint64_t> sr_meshes = {256, 1024, 4096};
  std::uint64_t sr_grid = 4096;
  add_common(sr, common);
  sr->add_option("--field", sr_field, "integrand field name");
  sr->add_option("--g-field", sr_g, "substitution field (needs curvature)");
  sr->add_option("--v-path", sr_v, "drift path");
  sr->add_option("--T", sr_T, "horizon");
  sr->add_option("--meshes", sr_meshes, "partition sizes");
  sr->add_option("--tol", sr_tol, "residual tolerance");
  sr->add_option("--grid-points", sr_grid, "path grid intervals");

  // nvar
  auto* nv = app.add_subcommand("nvar", "strong n-variation estimates");
  int nv_order = 3;
  std::vector<double> nv_eps = {0.1, 0.05, 0.01};
  double nv_T1 = kTwoPi;
  std::uint64_t nv_grid = 16384;
  add_common(nv, common);
  nv->add_option("--order", nv_order, "variation order n >= 2");
  nv->add_option("--eps", nv_eps, "window widths");
  nv->add_option("--T1", nv_T1, "integration horizon");
  nv->add_option("--grid-points", nv_grid, "path grid intervals");

  // sde-solve / sde-verify
  auto add_sde_opts = [&](CLI::App* cmd, std::string& sigma, double& sigma_c,
                          std::string& drift, double& drift_k, double& x0,
                          double& T, std::uint64_t& grid, double& step) {
    add_common(cmd, common);
    cmd->add_option("--sigma", sigma, "diffusion name");
    cmd->add_option("--sigma-c", sigma_c, "constant for const-sigma");
    cmd->add_option("--drift", drift, "drift name");
    cmd->add_option("--drift-k", drift_k, "drift scale K");
    cmd->add_option("--x0", x0, "initial value");
    cmd->add_option("--T", T, "horizon");
    cmd->add_option("--grid-points", grid, "path grid intervals");
    cmd->add_option("--flow-step", step, "flow tabulation step");
  };
  auto* ss = app.add_subcommand("sde-solve", "solve the driven equation");
  std::string ss_sigma = "linear-sigma", ss_drift = "zero-drift";
  double ss_sigma_c = 1.0, ss_drift_k = 1.0, ss_x0 = 1.0, ss_T = kTwoPi,
         ss_step = 1e-3;
  std::uint64_t ss_grid = 4096;
  add_sde_opts(ss, ss_sigma, ss_sigma_c, ss_drift, ss_drift_k, ss_x0, ss_T,
               ss_grid, ss_step);

  auto* sv = app.add_subcommand("sde-verify",
                                "solve and check the integral identity");
  std::string sv_sigma = "linear-sigma", sv_drift = "zero-drift",
              sv_psi = "unit";
  double sv_sigma_c = 1.0, sv_drift_k = 1.0, sv_x0 = 1.0, sv_T = kTwoPi,
         sv_step = 1e-3, sv_tol = 1e-2;
  std::uint64_t sv_grid = 4096, sv_mesh = 4096;
  add_sde_opts(sv, sv_sigma, sv_sigma_c, sv_drift, sv_drift_k, sv_x0, sv_T,
               sv_grid, sv_step);
  sv->add_option("--psi", sv_psi, "test field name");
  sv->add_option("--mesh", sv_mesh, "verification partition size");
  sv->add_option("--tol", sv_tol, "residual tolerance");

  // parseval
  auto* pv = app.add_subcommand("parseval", "partial series against its target");
  double pv_eps = 1.0;
  std::uint64_t pv_M = 1000000;
  add_common(pv, common);
  pv->add_option("--eps", pv_eps, "window width in (0, 2 pi)");
  pv->add_option("--M", pv_M, "partial sum length");

  // counterexamples
  auto* c1 = app.add_subcommand("counterexample1",
                                "oscillating quadratic-variation certificate");
  int c1_depth = 2;
  double c1_margin = 1e-3;
  std::string c1_check;
  add_common(c1, common);
  c1->add_option("--depth", c1_depth, "oscillation pairs");
  c1->add_option("--margin", c1_margin, "certification slack");
  c1->add_option("--check", c1_check, "re-verify an existing certificate JSON");

  auto* c2 = app.add_subcommand("counterexample2",
                                "oscillating dyadic-sum certificate");
  int c2_depth = 2, c2_seeds = 100;
  double c2_margin = 1e-3;
  std::string c2_check;
  add_common(c2, common);
  c2->add_option("--depth", c2_depth, "oscillation pairs");
  c2->add_option("--seeds", c2_seeds, "realizations per scale");
  c2->add_option("--margin", c2_margin, "certification slack");
  c2->add_option("--check", c2_check, "re-verify an existing certificate JSON");

  // quantile
  auto* qt = app.add_subcommand("quantile", "Monte Carlo quantile of an experiment");
  std::string qt_exp = "sum-squared-increments";
  unsigned qt_level = 8;
  double qt_eps = 0.1, qt_q = 0.99;
  int qt_order = 2, qt_seeds = 100;
  std::uint64_t qt_grid = 8192;
  add_common(qt, common);
  qt->add_option("--experiment", qt_exp, "sum-squared-increments or nvar");
  qt->add_option("--level", qt_level, "dyadic level");
  qt->add_option("--eps", qt_eps, "window width for nvar");
  qt->add_option("--order", qt_order, "variation order for nvar");
  qt->add_option("--seeds", qt_seeds, "seed count");
  qt->add_option("--q", qt_q, "quantile in (0, 1)");
  qt->add_option("--grid-points", qt_grid, "path grid intervals for nvar");

  try {
    app.parse(argc, argv);
    CLI::App* sub = app.get_subcommands().front();
    apply_config_file(sub, common.config_file);

    if (sub == sp)
      return run_sample_path(common, sp_points, sp_horizon, sp_max_index,
                             sp_levels);
    if (sub == si)
      return run_sym_integral(common, si_xi, si_v, si_T, si_meshes, si_tol,
                              si_grid);
    if (sub == cr)
      return run_chain_rule(common, cr_field, cr_v, cr_T, cr_meshes, cr_tol,
                            cr_grid, cr_step);
    if (sub == sr)
      return run_substitution(common, sr_field, sr_g, sr_v, sr_T, sr_meshes,
                              sr_tol, sr_grid);
    if (sub == nv) return run_nvar(common, nv_order, nv_eps, nv_T1, nv_grid);
    if (sub == ss)
      return run_sde(common, ss_sigma, ss_sigma_c, ss_drift, ss_drift_k, ss_x0,
                     ss_T, ss_grid, ss_step, false, "", 0, 0.0);
    if (sub == sv)
      return run_sde(common, sv_sigma, sv_sigma_c, sv_drift, sv_drift_k, sv_x0,
                     sv_T, sv_grid, sv_step, true, sv_psi, sv_mesh, sv_tol);
    if (sub == pv) return run_parseval(common, pv_eps, pv_M);
    if (sub == c1) return run_counterexample1(common, c1_depth, c1_margin, c1_check);
    if (sub == c2)
      return run_counterexample2(common, c2_depth, c2_seeds, c2_margin, c2_check);
    if (sub == qt)
      return run_quantile(common, qt_exp, qt_level, qt_eps, qt_order, qt_seeds,
                          qt_q, qt_grid);
    std::cerr << "error: unhandled subcommand\n";
    return 2;
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
