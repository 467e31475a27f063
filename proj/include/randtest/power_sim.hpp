#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "randtest/rational.hpp"
#include "randtest/scheme.hpp"

namespace randtest {

// Monte Carlo size/power study comparing two randomization schemes at a grid
// of significance levels. Each test is simulated under its own scheme (the
// two designs are different data-gathering mechanisms, not two analyses of
// one dataset) with independent substreams per (test, arm, replication),
// so tables are bit-identical for any worker count.
struct SimConfig {
  int n = 8;
  std::string scheme_a = "forced-balance";
  std::string scheme_b = "bernoulli-nc";
  double effect = 2.0;                      // additive shift under the alternative
  std::string null_model = "half-normal";   // |N(0,1)| responses under the null
  std::vector<double> alpha_grid = {1.0 / 254.0, 0.005, 0.01, 0.02, 0.05};
  int replications = 10000;
  std::uint64_t seed = 0;
  std::string stat = "centered-diff";

  void validate() const;
};

struct SimRow {
  std::string test;
  double alpha = 0;
  double size = 0;
  double power = 0;
  double se_size = 0;
  double se_power = 0;

  friend bool operator==(const SimRow&, const SimRow&) = default;
};

struct SimTable {
  std::vector<SimRow> rows;

  std::string to_csv() const;  // header test,alpha,size,power,se_size,se_power
  nlohmann::json to_json() const;
  static SimTable from_json(const nlohmann::json& j);
  friend bool operator==(const SimTable&, const SimTable&) = default;
};

SimTable simulate(const SimConfig& config, int workers = 1);

// R, the smallest attainable p-value 1/R, and the attainable-level spacing
// 1/R: the resolution of the scheme's exact p-values.
struct ResolutionReport {
  std::string label;
  std::int64_t patterns = 0;
  Rational min_p;
  Rational spacing;

  nlohmann::json to_json() const;
  static ResolutionReport from_json(const nlohmann::json& j);
  friend bool operator==(const ResolutionReport&, const ResolutionReport&) = default;
};

ResolutionReport resolution_report(const RandomizationScheme& scheme);

}  // namespace randtest
