#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <numbers>
#include <vector>

#include "smcalc/calculus.hpp"
#include "smcalc/counterexamples.hpp"
#include "smcalc/integration.hpp"
#include "smcalc/sde.hpp"
#include "smcalc/serialize.hpp"
#include "smcalc/sm_core.hpp"

namespace py = pybind11;
using namespace smcalc;

namespace {

CoefficientProfile profile_from_pairs(
    const std::vector<std::pair<std::int64_t, std::int64_t>>& pairs) {
  std::vector<IndexInterval> ivs;
  ivs.reserve(pairs.size());
  for (const auto& [lo, hi] : pairs) {
    if (lo < 1) throw std::invalid_argument("profile: m must be >= 1");
    IndexInterval iv;
    iv.lo = static_cast<std::uint64_t>(lo);
    iv.hi = hi < 0 ? kUnboundedIndex : static_cast<std::uint64_t>(hi);
    ivs.push_back(iv);
  }
  return CoefficientProfile(std::move(ivs));
}

std::vector<Partition> uniform_parts(double T,
                                     const std::vector<std::uint64_t>& js) {
  std::vector<Partition> out;
  out.reserve(js.size());
  for (auto j : js) out.push_back(Partition::uniform(T, j));
  return out;
}

}  // namespace

PYBIND11_MODULE(_smcalc, m) {
  m.doc() =
      "Symmetric (midpoint) integration against random Fourier-series "
      "stochastic measures: path sampling, integral sums, a Doss-Sussmann "
      "equation solver, and oscillation certificates.";

  m.attr("DEFAULT_HORIZON") = kDefaultHorizon;

  py::class_<CoefficientProfile>(m, "CoefficientProfile")
      .def(py::init(&profile_from_pairs), py::arg("intervals"),
           "intervals: list of (m, n) index pairs; n = -1 marks an unbounded "
           "interval")
      .def_static("all_modes", &CoefficientProfile::all_modes)
      .def("contains", &CoefficientProfile::contains)
      .def("finite", &CoefficientProfile::finite)
      .def("empty", &CoefficientProfile::empty)
      .def("max_index", &CoefficientProfile::max_index)
      .def("__repr__", [](const CoefficientProfile& p) {
        return "CoefficientProfile(" + profile_to_json(p).dump() + ")";
      });

  py::class_<SampledPath>(m, "SampledPath")
      .def(py::init<double, double, std::vector<double>>(), py::arg("t0"),
           py::arg("dt"), py::arg("values"))
      .def_property_readonly("t0", &SampledPath::t0)
      .def_property_readonly("dt", &SampledPath::dt)
      .def_property_readonly("values",
                             [](const SampledPath& p) { return p.values(); })
      .def("times",
           [](const SampledPath& p) {
             std::vector<double> t(p.size());
             for (std::size_t k = 0; k < p.size(); ++k) t[k] = p.t(k);
             return t;
           })
      .def("at", &SampledPath::at)
      .def("__len__", &SampledPath::size);

  py::class_<FourierSM>(m, "FourierSM")
      .def(py::init([](const CoefficientProfile& profile, std::uint64_t seed,
                       std::uint64_t max_index, double horizon) {
             TruncationPolicy trunc;
             trunc.max_index = max_index;
             return FourierSM(profile, seed, trunc, horizon);
           }),
           py::arg("profile"), py::arg("seed"),
           py::arg("max_index") = std::uint64_t{1} << 16,
           py::arg("horizon") = kDefaultHorizon)
      .def("measure_of_interval",
           [](const FourierSM& sm, double a, double b) {
             const auto mv = sm.measure_of_interval(a, b);
             return py::make_tuple(mv.value, mv.tail_bound);
           })
      .def("sample_path", &FourierSM::sample_path, py::arg("t0"),
           py::arg("dt"), py::arg("count"))
      .def("path_tail_bound", &FourierSM::path_tail_bound)
      .def("sign", [](const FourierSM& sm, std::uint64_t i) {
        return sm.signs().sign(i);
      });

  py::class_<Partition>(m, "Partition")
      .def_static("uniform", &Partition::uniform, py::arg("T"), py::arg("j"))
      .def_static("dyadic", &Partition::dyadic, py::arg("T"), py::arg("level"))
      .def_property_readonly("points",
                             [](const Partition& p) { return p.points(); })
      .def("mesh", &Partition::mesh);

  m.def("holder_diagnostic", [](const SampledPath& path, int levels) {
    const auto d = holder_diagnostic(path, levels);
    py::dict out;
    out["gamma_hat"] = d.gamma_hat;
    out["defined"] = d.defined;
    out["scale_table"] = d.scale_table;
    return out;
  });

  m.def("symmetric_sum", &symmetric_sum);
  m.def(
      "symmetric_integral",
      [](const SampledPath& xi, const SampledPath& eta, double T,
         const std::vector<std::uint64_t>& meshes, double tol) {
        const auto parts = uniform_parts(T, meshes);
        const auto rep = symmetric_integral(xi, eta, parts, tol);
        py::dict out;
        out["estimates"] = rep.estimates;
        out["extrapolated"] = rep.extrapolated_value;
        out["converged"] = rep.converged;
        out["spread"] = rep.spread;
        return out;
      },
      py::arg("xi"), py::arg("eta"), py::arg("T"), py::arg("meshes"),
      py::arg("tol") = kDefaultConvergenceTol);
  m.def("stieltjes_integral",
        py::overload_cast<const SampledPath&, const SampledPath&,
                          const Partition&>(&stieltjes_integral));
  m.def("strong_variation_estimate", &strong_variation_estimate,
        py::arg("path"), py::arg("n"), py::arg("eps"), py::arg("T1"));
  m.def("sum_squared_increments", &sum_squared_increments);
  m.def("boundedness_quantile", &boundedness_quantile, py::arg("experiment"),
        py::arg("seeds"), py::arg("q"), py::arg("threads") = 1);

  m.def(
      "verify_chain_rule",
      [](const std::string& field, const FourierSM& sm, const std::string& v,
         double T, std::uint64_t grid_points,
         const std::vector<std::uint64_t>& meshes, double tol) {
        const auto mu = sm.sample_path(
            0.0, T / static_cast<double>(grid_points), grid_points + 1);
        const std::size_t n = 1025;
        const double dt = T / static_cast<double>(n - 1);
        SampledPath V = SampledPath::from_function(
            0.0, dt, n, [&](double t) {
              if (v == "zero") return 0.0;
              if (v == "t") return t;
              if (v == "half-t") return 0.5 * t;
              throw std::invalid_argument("unknown v path: " + v);
            });
        const auto parts = uniform_parts(T, meshes);
        const auto check =
            verify_chain_rule(field_catalog(field), mu, V, parts, tol);
        py::dict out;
        out["residual"] = check.residual;
        out["rhs"] = check.rhs;
        out["extrapolated"] = check.lhs.extrapolated_value;
        out["converged"] = check.lhs.converged;
        out["pass"] = check.pass;
        return out;
      },
      py::arg("field"), py::arg("sm"), py::arg("v") = "zero",
      py::arg("T") = kDefaultHorizon, py::arg("grid_points") = 4096,
      py::arg("meshes") = std::vector<std::uint64_t>{256, 1024, 4096},
      py::arg("tol") = 1e-2);

  m.def(
      "solve_sde",
      [](const std::string& sigma, double sigma_c, const std::string& drift,
         double drift_k, double x0, const FourierSM& sm, double T,
         std::uint64_t grid_points, double flow_step) {
        const auto mu = sm.sample_path(
            0.0, T / static_cast<double>(grid_points), grid_points + 1);
        const auto sol = solve_sde(sigma_catalog(sigma, sigma_c),
                                   drift_catalog(drift, drift_k), x0, mu,
                                   flow_step);
        return py::make_tuple(sol.X, sol.Y);
      },
      py::arg("sigma"), py::arg("sigma_c"), py::arg("drift"),
      py::arg("drift_k"), py::arg("x0"), py::arg("sm"),
      py::arg("T") = kDefaultHorizon, py::arg("grid_points") = 4096,
      py::arg("flow_step") = 1e-3);

  m.def("parseval_check",
        [](double eps, std::uint64_t M, unsigned threads) {
          const auto r = parseval_check(eps, M, threads);
          return py::make_tuple(r.partial_sum, r.tail_bound, r.target);
        },
        py::arg("eps"), py::arg("M"), py::arg("threads") = 1);
  m.def("f_of_eps",
        [](const CoefficientProfile& p, double eps, std::uint64_t M) {
          const auto r = f_of_eps(p, eps, M);
          return py::make_tuple(r.value, r.error);
        });
  m.def("quadratic_variation_mc", &quadratic_variation_mc);
  m.def("diagonal_S", &diagonal_S, py::arg("profile"), py::arg("level"),
        py::arg("threads") = 1);
  m.def("empirical_dyadic_S", &empirical_dyadic_S);

  m.def("construct_oscillator1", [](int depth, double margin) {
    return certificate_to_json(construct_oscillator1(depth, margin)).dump();
  }, py::arg("depth"), py::arg("margin") = 1e-3);
  m.def("construct_oscillator2", [](int depth, int seeds, double margin) {
    return certificate_to_json(construct_oscillator2(depth, seeds, margin))
        .dump();
  }, py::arg("depth"), py::arg("seeds"), py::arg("margin") = 1e-3);
  m.def("reverify_certificate", [](const std::string& text) {
    const json j = json::parse(text);
    if (j.value("type", "") == "oscillator1")
      return reverify(oscillator1_from_json(j));
    if (j.value("type", "") == "oscillator2")
      return reverify(oscillator2_from_json(j));
    throw std::invalid_argument("unknown certificate type");
  });

  m.def("field_catalog_names", &field_catalog_names);
  m.def("sigma_catalog_names", &sigma_catalog_names);
  m.def("drift_catalog_names", &drift_catalog_names);
}
