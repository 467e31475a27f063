#pragma once

#include <istream>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "randtest/pattern.hpp"
#include "randtest/power_sim.hpp"
#include "randtest/statistics.hpp"

namespace randtest {

// Trial data: one row per unit, header "id,w,y". Treatment indicators binary,
// responses finite, unit ids unique.
struct DataFile {
  std::vector<std::string> ids;
  AssignmentPattern w;
  OutcomeVector y;
};

DataFile parse_data_csv(std::istream& in);
DataFile load_data_csv(const std::string& path);

// Flat TOML subset: `key = value` lines with strings, integers, floats,
// booleans and one-line arrays; '#' comments. Covers experiment manifests;
// nested tables are rejected.
using TomlValue = std::variant<bool, std::int64_t, double, std::string, std::vector<double>,
                               std::vector<std::string>>;
std::map<std::string, TomlValue> parse_toml(std::istream& in);

// Reads a SimConfig from a .toml or .json manifest. Unknown keys are errors:
// a silently ignored typo in an experiment manifest is worse than a failure.
SimConfig load_sim_config(const std::string& path);

}  // namespace randtest
