#include "smcalc/serialize.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace smcalc {

json profile_to_json(const CoefficientProfile& profile) {
  json arr = json::array();
  for (const auto& iv : profile.intervals()) {
    json pair = json::array();
    pair.push_back(iv.lo);
    if (iv.hi == kUnboundedIndex)
      pair.push_back(-1);
    else
      pair.push_back(iv.hi);
    arr.push_back(std::move(pair));
  }
  return arr;
}

CoefficientProfile profile_from_json(const json& j) {
  if (!j.is_array()) throw std::invalid_argument("profile json: expected an array");
  std::vector<IndexInterval> intervals;
  for (const auto& pair : j) {
    if (!pair.is_array() || pair.size() != 2)
      throw std::invalid_argument("profile json: expected [m, n] pairs");
    const auto lo = pair[0].get<std::int64_t>();
    const auto hi = pair[1].get<std::int64_t>();
    if (lo < 1) throw std::invalid_argument("profile json: m must be >= 1");
    IndexInterval iv;
    iv.lo = static_cast<std::uint64_t>(lo);
    if (hi == -1 || pair[1].is_null())
      iv.hi = kUnboundedIndex;
    else if (hi < lo)
      throw std::invalid_argument("profile json: n must be >= m or -1");
    else
      iv.hi = static_cast<std::uint64_t>(hi);
    intervals.push_back(iv);
  }
  return CoefficientProfile(std::move(intervals));
}

json report_to_json(const ConvergenceReport& report) {
  json estimates = json::array();
  for (const auto& [mesh, value] : report.estimates)
    estimates.push_back(json::array({mesh, value}));
  return json{{"estimates", std::move(estimates)},
              {"extrapolated", report.extrapolated_value},
              {"converged", report.converged},
              {"spread", report.spread},
              {"window", report.window},
              {"tol", report.tol}};
}

json certificate_to_json(const Oscillator1Certificate& cert) {
  return json{{"type", "oscillator1"},
              {"depth", cert.depth},
              {"margin", cert.margin},
              {"profile", profile_to_json(cert.profile)},
              {"eps", cert.eps},
              {"f_values", cert.f_values},
              {"f_errors", cert.f_errors},
              {"head_values", cert.head_values},
              {"tail_start", cert.tail_start},
              {"tail_bounds", cert.tail_bounds}};
}

Oscillator1Certificate oscillator1_from_json(const json& j) {
  if (j.value("type", "") != "oscillator1")
    throw std::invalid_argument("certificate json: type must be oscillator1");
  Oscillator1Certificate cert;
  cert.depth = j.at("depth").get<int>();
  cert.margin = j.at("margin").get<double>();
  cert.profile = profile_from_json(j.at("profile"));
  cert.eps = j.at("eps").get<std::vector<double>>();
  cert.f_values = j.at("f_values").get<std::vector<double>>();
  cert.f_errors = j.at("f_errors").get<std::vector<double>>();
  cert.head_values = j.at("head_values").get<std::vector<double>>();
  cert.tail_start = j.at("tail_start").get<std::vector<std::uint64_t>>();
  cert.tail_bounds = j.at("tail_bounds").get<std::vector<double>>();
  return cert;
}

json certificate_to_json(const Oscillator2Certificate& cert) {
  return json{{"type", "oscillator2"},
              {"depth", cert.depth},
              {"seeds", cert.seeds},
              {"margin", cert.margin},
              {"profile", profile_to_json(cert.profile)},
              {"n_scales", cert.n_scales},
              {"tilde_scales", cert.tilde_scales},
              {"continuation_scale", cert.continuation_scale},
              {"S_diagonal", cert.S_diagonal},
              {"A_values", cert.A_values},
              {"EB_values", cert.EB_values},
              {"S_empirical", cert.S_empirical},
              {"fraction_below_one", cert.fraction_below_one}};
}

Oscillator2Certificate oscillator2_from_json(const json& j) {
  if (j.value("type", "") != "oscillator2")
    throw std::invalid_argument("certificate json: type must be oscillator2");
  Oscillator2Certificate cert;
  cert.depth = j.at("depth").get<int>();
  cert.seeds = j.at("seeds").get<int>();
  cert.margin = j.at("margin").get<double>();
  cert.profile = profile_from_json(j.at("profile"));
  cert.n_scales = j.at("n_scales").get<std::vector<unsigned>>();
  cert.tilde_scales = j.at("tilde_scales").get<std::vector<unsigned>>();
  cert.continuation_scale = j.at("continuation_scale").get<unsigned>();
  cert.S_diagonal = j.at("S_diagonal").get<std::vector<double>>();
  cert.A_values = j.at("A_values").get<std::vector<double>>();
  cert.EB_values = j.at("EB_values").get<std::vector<double>>();
  cert.S_empirical = j.at("S_empirical").get<std::vector<std::vector<double>>>();
  cert.fraction_below_one =
      j.at("fraction_below_one").get<std::vector<double>>();
  return cert;
}

namespace {

void write_lines(const std::filesystem::path& file, const std::string& body) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + file.string());
  out << body;
  if (!out) throw std::runtime_error("write failed: " + file.string());
}

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void write_path_csv(const SampledPath& path, const std::filesystem::path& file,
                    const json& config) {
  std::string body;
  if (!config.is_null() && !config.empty())
    body += "# config: " + config.dump() + "\n";
  body += "t,value\n";
  for (std::size_t k = 0; k < path.size(); ++k)
    body += fmt17(path.t(k)) + "," + fmt17(path[k]) + "\n";
  write_lines(file, body);
}

void write_table_csv(const std::vector<std::pair<double, double>>& rows,
                     const std::string& header,
                     const std::filesystem::path& file, const json& config) {
  std::string body;
  if (!config.is_null() && !config.empty())
    body += "# config: " + config.dump() + "\n";
  body += header + "\n";
  for (const auto& [a, b] : rows) body += fmt17(a) + "," + fmt17(b) + "\n";
  write_lines(file, body);
}

void write_json_file(const json& j, const std::filesystem::path& file) {
  write_lines(file, j.dump(2) + "\n");
}

json read_json_file(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + file.string());
  json j;
  in >> j;
  return j;
}

}  // namespace smcalc
