#include <doctest.h>

#include <filesystem>
#include <stdexcept>
#include <fstream>

#include "smcalc/serialize.hpp"

using namespace smcalc;

TEST_CASE("profile json round trip") {
  const CoefficientProfile p({{1, 8}, {20, 31}});
  const auto j = profile_to_json(p);
  CHECK(j.dump() == "[[1,8],[20,31]]");
  CHECK(profile_from_json(j) == p);

  const auto full = CoefficientProfile::all_modes();
  const auto jf = profile_to_json(full);
  CHECK(jf.dump() == "[[1,-1]]");
  CHECK(profile_from_json(jf) == full);

  CHECK_THROWS_AS(profile_from_json(json::parse("[[0,4]]")), std::invalid_argument);
  CHECK_THROWS_AS(profile_from_json(json::parse("[[4,2]]")), std::invalid_argument);
  CHECK_THROWS_AS(profile_from_json(json::parse("{\"a\":1}")), std::invalid_argument);
}

TEST_CASE("report json carries the documented keys") {
  ConvergenceReport r;
  r.estimates = {{0.1, 1.5}, {0.05, 1.25}, {0.01, 1.2}};
  r.extrapolated_value = 1.2;
  r.converged = true;
  r.spread = 0.3;
  const auto j = report_to_json(r);
  CHECK(j.at("extrapolated").get<double>() == 1.2);
  CHECK(j.at("converged").get<bool>());
  CHECK(j.at("spread").get<double>() == 0.3);
  CHECK(j.at("estimates").size() == 3);
  CHECK(j.at("estimates")[0][0].get<double>() == 0.1);
}

TEST_CASE("certificate json round trips") {
  const auto c1 = construct_oscillator1(1, 0.01);
  const auto j1 = certificate_to_json(c1);
  const auto back1 = oscillator1_from_json(j1);
  CHECK(back1.profile == c1.profile);
  CHECK(back1.eps == c1.eps);
  CHECK(back1.f_values == c1.f_values);
  CHECK(reverify(back1));

  const auto c2 = construct_oscillator2(1, 12);
  const auto j2 = certificate_to_json(c2);
  const auto back2 = oscillator2_from_json(j2);
  CHECK(back2.profile == c2.profile);
  CHECK(back2.S_empirical == c2.S_empirical);
  CHECK(reverify(back2));

  CHECK_THROWS_AS(oscillator1_from_json(j2), std::invalid_argument);
}

TEST_CASE("csv writers") {
  namespace fs = std::filesystem;
  const auto dir = fs::temp_directory_path() / "smcalc_serialize_test";
  fs::create_directories(dir);

  const SampledPath path(0.0, 0.5, {0.0, 1.0, 0.25});
  const auto file = dir / "path.csv";
  write_path_csv(path, file, json{{"seed", 7}});
  std::ifstream in(file);
  std::string line;
  std::getline(in, line);
  CHECK(line.rfind("# config:", 0) == 0);
  std::getline(in, line);
  CHECK(line == "t,value");
  std::getline(in, line);
  CHECK(line == "0,0");
  std::getline(in, line);
  CHECK(line == "0.5,1");

  const auto tfile = dir / "table.csv";
  write_table_csv({{0.1, 2.0}}, "mesh,sum", tfile);
  std::ifstream tin(tfile);
  std::getline(tin, line);
  CHECK(line == "mesh,sum");

  fs::remove_all(dir);
}
