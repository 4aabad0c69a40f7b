#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "smcalc/counterexamples.hpp"
#include "smcalc/integration.hpp"
#include "smcalc/sm_core.hpp"

namespace smcalc {

using json = nlohmann::json;

// Profiles are JSON arrays of [m, n] pairs; n = -1 marks an unbounded
// interval.
json profile_to_json(const CoefficientProfile& profile);
CoefficientProfile profile_from_json(const json& j);

json report_to_json(const ConvergenceReport& report);

json certificate_to_json(const Oscillator1Certificate& cert);
Oscillator1Certificate oscillator1_from_json(const json& j);

json certificate_to_json(const Oscillator2Certificate& cert);
Oscillator2Certificate oscillator2_from_json(const json& j);

/// CSV with header "t,value", 17 significant digits. When config is given
/// it is echoed as a leading "# config: {...}" comment line.
void write_path_csv(const SampledPath& path, const std::filesystem::path& file,
                    const json& config = {});

/// Two-column CSV with the given header (e.g. "mesh,sum").
void write_table_csv(const std::vector<std::pair<double, double>>& rows,
                     const std::string& header,
                     const std::filesystem::path& file,
                     const json& config = {});

void write_json_file(const json& j, const std::filesystem::path& file);
json read_json_file(const std::filesystem::path& file);

}  // namespace smcalc
