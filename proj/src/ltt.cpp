#include "randtest/ltt.hpp"

#include <nlohmann/json.hpp>

#include "randtest/combinatorics.hpp"
#include "randtest/errors.hpp"
#include "randtest/scheme.hpp"

namespace randtest {

namespace {

void require_balanced(const AssignmentPattern& truth) {
  if (truth.n() % 2 != 0 || truth.ones() != truth.n() / 2) {
    throw InvalidArgument("ltt: the true order must have m ones out of 2m cups");
  }
}

StatisticSpec match_stat() {
  return StatisticSpec{StatKind::fisher_match, Sidedness::upper};
}

}  // namespace

std::vector<std::int64_t> ltt_count_distribution(int m) {
  if (m < 1) throw InvalidArgument("ltt_count_distribution: m must be >= 1");
  std::vector<std::int64_t> counts(static_cast<std::size_t>(m) + 1);
  for (int j = 0; j <= m; ++j) {
    counts[static_cast<std::size_t>(j)] = binomial(m, j) * binomial(m, m - j);
  }
  return counts;
}

TestReport ltt_run(const AssignmentPattern& truth, const AssignmentPattern& guess, double alpha) {
  require_balanced(truth);
  if (guess.n() != truth.n() || guess.ones() != truth.ones()) {
    throw InvalidArgument("ltt_run: the guess must also name exactly m cups; "
                          "use ltt_run_free_guess for unrestricted guesses");
  }
  return ltt_run_free_guess(truth, guess, alpha);
}

TestReport ltt_run_free_guess(const AssignmentPattern& truth, const AssignmentPattern& guess,
                              double alpha) {
  require_balanced(truth);
  if (guess.n() != truth.n()) throw InvalidArgument("ltt: truth and guess lengths differ");
  const auto scheme = ltt_scheme(truth.n() / 2);
  return randomization_test(scheme, truth, guess.to_outcomes(), match_stat(), alpha);
}

LttOutcome ltt_analyze(const AssignmentPattern& truth, const AssignmentPattern& guess,
                       double alpha) {
  require_balanced(truth);
  const int m = truth.n() / 2;
  LttOutcome out;
  out.m = m;
  out.correct_milk_first = fisher_match(truth, guess);
  const auto report = guess.ones() == m ? ltt_run(truth, guess, alpha)
                                        : ltt_run_free_guess(truth, guess, alpha);
  out.p_value = report.p.exact;
  const auto counts = ltt_count_distribution(m);
  const std::int64_t total = binomial(2 * m, m);
  std::int64_t tail = 0;
  std::vector<std::pair<int, Rational>> table;
  for (int j = m; j >= 0; --j) {
    tail += counts[static_cast<std::size_t>(j)];
    table.emplace_back(j, Rational(tail, total));
  }
  out.level_table.assign(table.rbegin(), table.rend());
  return out;
}

LttOutcome LttOutcome::from_json(const nlohmann::json& j) {
  LttOutcome out;
  out.m = j.at("m").get<int>();
  out.correct_milk_first = j.at("correct_milk_first").get<int>();
  out.p_value = Rational(j.at("p").at("num").get<std::int64_t>(),
                         j.at("p").at("den").get<std::int64_t>());
  for (const auto& row : j.at("level_table")) {
    out.level_table.emplace_back(row.at("min_correct").get<int>(),
                                 Rational(row.at("level").at("num").get<std::int64_t>(),
                                          row.at("level").at("den").get<std::int64_t>()));
  }
  return out;
}

nlohmann::json LttOutcome::to_json() const {
  nlohmann::json j;
  j["m"] = m;
  j["correct_milk_first"] = correct_milk_first;
  j["p"] = {{"num", p_value.num()}, {"den", p_value.den()}};
  auto& table = j["level_table"] = nlohmann::json::array();
  for (const auto& [min_correct, level] : level_table) {
    table.push_back({{"min_correct", min_correct},
                     {"level", {{"num", level.num()}, {"den", level.den()}}},
                     {"level_value", level.value()}});
  }
  return j;
}

}  // namespace randtest
