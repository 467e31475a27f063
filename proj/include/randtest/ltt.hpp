#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "randtest/engine.hpp"
#include "randtest/pattern.hpp"
#include "randtest/rational.hpp"

namespace randtest {

// Lady tasting tea: 2m cups, m of each kind, the taster names the m
// "milk first" cups. The experimenter's random order is the treatment draw,
// so this is a randomization test; the match-count statistic makes it an
// instance of Fisher's exact test, which the tail-sum identity below
// reproduces without a separate hypergeometric routine.

// count[j] = number of orders with exactly j correct milk-first picks
// = C(m, j) * C(m, m-j), for j = 0..m.
std::vector<std::int64_t> ltt_count_distribution(int m);

struct LttOutcome {
  int m = 0;
  int correct_milk_first = 0;
  Rational p_value;
  // (j, exact level of the rule "reject when at least j picks are correct")
  std::vector<std::pair<int, Rational>> level_table;

  nlohmann::json to_json() const;
  static LttOutcome from_json(const nlohmann::json& j);
  friend bool operator==(const LttOutcome&, const LttOutcome&) = default;
};

// The classical experiment: both patterns carry m ones out of 2m (the taster
// knows the design). Milk-first is coded 1.
TestReport ltt_run(const AssignmentPattern& truth, const AssignmentPattern& guess, double alpha);

// The taster does not know the design: any binary guess of length 2m is
// admitted; the p-value still enumerates only the experimenter's orders.
TestReport ltt_run_free_guess(const AssignmentPattern& truth, const AssignmentPattern& guess,
                              double alpha);

// Bundles the report inputs with the closed-form level table for the CLI.
LttOutcome ltt_analyze(const AssignmentPattern& truth, const AssignmentPattern& guess,
                       double alpha);

}  // namespace randtest
