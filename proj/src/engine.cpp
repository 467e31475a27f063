#include "randtest/engine.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "randtest/errors.hpp"

namespace randtest {

namespace {

void require_length(int expected, std::size_t got, const char* who) {
  if (expected != static_cast<int>(got)) {
    throw InvalidArgument(std::string(who) + ": responses must have length n");
  }
}

void require_member(const RandomizationScheme& scheme, const AssignmentPattern& w_obs) {
  if (!scheme.contains(w_obs)) {
    throw DesignViolation("observed assignment " + w_obs.str() + " is not in scheme '" +
                          scheme.label() +
                          "'; the scheme must be the one declared before treatment");
  }
}

std::vector<double> enumerate_statistics(const RandomizationScheme& scheme,
                                         std::span<const double> y, const StatisticSpec& stat) {
  const auto masks = scheme.masks();
  std::vector<double> values;
  values.reserve(masks.size());
  for (const std::uint64_t m : masks) {
    values.push_back(evaluate(stat, m, scheme.n(), y));
  }
  return values;
}

void ensure_group(const TransformationGroup& group) {
  if (group.validated) return;
  const auto report = check_group(group);
  if (!report.is_group()) {
    throw GroupStructureViolation("'" + group.label + "' is not a group: " +
                                  report.describe_failure());
  }
}

// Statistic values over all transformed copies of x, plus the observed value.
struct GroupStatistics {
  std::vector<double> values;
  double observed;
};

GroupStatistics group_statistics(const TransformationGroup& group, std::span<const double> x,
                                 const StatisticSpec& stat, const AssignmentPattern& split) {
  if (group.elements.empty()) throw InvalidArgument("group test: element set is empty");
  require_length(group.n, x.size(), "group test");
  if (split.n() != group.n) throw InvalidArgument("group test: split length mismatch");
  GroupStatistics out;
  out.observed = evaluate(stat, split, x);
  out.values.reserve(group.elements.size());
  std::vector<double> scratch(x.size());
  for (const auto& g : group.elements) {
    g.apply_into(x, scratch);
    out.values.push_back(evaluate(stat, split.mask(), group.n, scratch));
  }
  return out;
}

TestReport report_from_values(std::vector<double>&& values, double observed, double alpha) {
  const auto size = static_cast<std::int64_t>(values.size());
  std::int64_t count_geq = 0;
  for (const double v : values) {
    if (v >= observed) ++count_geq;
  }
  const std::int64_t k = threshold_rank(alpha, size);
  std::sort(values.begin(), values.end());
  TestReport report;
  report.observed_stat = observed;
  report.p = PValue{Rational(count_geq, size), count_geq, size,
                    static_cast<double>(count_geq) / static_cast<double>(size), true};
  report.family_size = size;
  report.threshold_index = k;
  report.threshold_value = values[static_cast<std::size_t>(k - 1)];
  report.reject = observed > report.threshold_value;
  report.alpha = alpha;
  report.method = Method::exact_enumeration;
  return report;
}

}  // namespace

std::int64_t allowed_count(double alpha, std::int64_t size) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw InvalidArgument("alpha must lie strictly inside (0, 1)");
  }
  const double x = alpha * static_cast<double>(size);
  const double guarded = x + 1e-9 * std::max(1.0, x);
  auto count = static_cast<std::int64_t>(std::floor(guarded));
  return std::clamp<std::int64_t>(count, 0, size - 1);
}

std::int64_t threshold_rank(double alpha, std::int64_t size) {
  return size - allowed_count(alpha, size);
}

PValue randomization_pvalue(const RandomizationScheme& scheme, const AssignmentPattern& w_obs,
                            std::span<const double> y, const StatisticSpec& stat) {
  stat.validate();
  require_length(scheme.n(), y.size(), "randomization_pvalue");
  require_member(scheme, w_obs);
  const double observed = evaluate(stat, w_obs, y);
  const auto masks = scheme.masks();
  if (scheme.uniform()) {
    std::int64_t count = 0;
    for (const std::uint64_t m : masks) {
      if (evaluate(stat, m, scheme.n(), y) >= observed) ++count;
    }
    return PValue{Rational(count, scheme.size()), count, scheme.size(),
                  static_cast<double>(count) / static_cast<double>(scheme.size()), true};
  }
  double mass = 0;
  for (std::size_t i = 0; i < masks.size(); ++i) {
    if (evaluate(stat, masks[i], scheme.n(), y) >= observed) {
      mass += scheme.weight(static_cast<std::int64_t>(i));
    }
  }
  return PValue{Rational{}, 0, 0, mass, false};
}

PValue randomization_pvalue(const RandomizationScheme& scheme, const AssignmentPattern& w_obs,
                            const AssignmentPattern& y, const StatisticSpec& stat) {
  return randomization_pvalue(scheme, w_obs, y.to_outcomes(), stat);
}

TestReport randomization_test(const RandomizationScheme& scheme, const AssignmentPattern& w_obs,
                              std::span<const double> y, const StatisticSpec& stat, double alpha) {
  stat.validate();
  if (!scheme.uniform()) {
    throw InvalidArgument(
        "randomization_test: the threshold form is defined for uniform schemes; "
        "use randomization_pvalue for weighted schemes");
  }
  require_length(scheme.n(), y.size(), "randomization_test");
  require_member(scheme, w_obs);
  auto values = enumerate_statistics(scheme, y, stat);
  return report_from_values(std::move(values), evaluate(stat, w_obs, y), alpha);
}

TestReport group_invariance_test(const TransformationGroup& group, std::span<const double> x,
                                 const StatisticSpec& stat, const AssignmentPattern& split,
                                 double alpha) {
  stat.validate();
  ensure_group(group);
  auto stats = group_statistics(group, x, stat, split);
  return report_from_values(std::move(stats.values), stats.observed, alpha);
}

TestReport group_invariance_test_unsafe(const TransformationGroup& elements,
                                        std::span<const double> x, const StatisticSpec& stat,
                                        const AssignmentPattern& split, double alpha) {
  stat.validate();
  auto stats = group_statistics(elements, x, stat, split);
  auto report = report_from_values(std::move(stats.values), stats.observed, alpha);
  report.method_valid = elements.validated || check_group(elements).is_group();
  return report;
}

bool group_invariance_rejects(const TransformationGroup& group, std::span<const double> x,
                              const StatisticSpec& stat, const AssignmentPattern& split,
                              double alpha, bool skip_validation) {
  stat.validate();
  if (!skip_validation) ensure_group(group);
  require_length(group.n, x.size(), "group test");
  const double observed = evaluate(stat, split, x);
  // reject <=> T(x) > v[k] <=> #{g : T(gx) >= T(x)} <= size - k; no sort.
  const auto size = static_cast<std::int64_t>(group.elements.size());
  const std::int64_t budget = allowed_count(alpha, size);
  std::int64_t count_geq = 0;
  std::vector<double> scratch(x.size());
  for (const auto& g : group.elements) {
    g.apply_into(x, scratch);
    if (evaluate(stat, split.mask(), group.n, scratch) >= observed) {
      if (++count_geq > budget) return false;
    }
  }
  return true;
}

Rational monte_carlo_pvalue(const RandomizationScheme& scheme, const AssignmentPattern& w_obs,
                            std::span<const double> y, const StatisticSpec& stat, int draws,
                            SplitMix64& rng) {
  stat.validate();
  if (draws < 1) throw InvalidArgument("monte_carlo_pvalue: at least one draw required");
  require_length(scheme.n(), y.size(), "monte_carlo_pvalue");
  require_member(scheme, w_obs);
  const double observed = evaluate(stat, w_obs, y);
  std::int64_t count = 0;
  for (int j = 0; j < draws; ++j) {
    const auto w = scheme.sample(rng);
    if (evaluate(stat, w, y) >= observed) ++count;
  }
  return Rational(1 + count, draws + 1);
}

Rational monte_carlo_pvalue(const TransformationGroup& group, std::span<const double> x,
                            const StatisticSpec& stat, const AssignmentPattern& split, int draws,
                            SplitMix64& rng) {
  stat.validate();
  if (draws < 1) throw InvalidArgument("monte_carlo_pvalue: at least one draw required");
  require_length(group.n, x.size(), "monte_carlo_pvalue");
  const double observed = evaluate(stat, split, x);
  std::vector<double> scratch(x.size());
  std::int64_t count = 0;
  for (int j = 0; j < draws; ++j) {
    const auto& g = group.elements[rng.next_below(group.elements.size())];
    g.apply_into(x, scratch);
    if (evaluate(stat, split.mask(), group.n, scratch) >= observed) ++count;
  }
  return Rational(1 + count, draws + 1);
}

std::vector<Rational> attainable_alphas(const RandomizationScheme& scheme,
                                        const StatisticSpec& stat, std::span<const double> y) {
  stat.validate();
  if (!scheme.uniform()) {
    throw InvalidArgument("attainable_alphas: defined for uniform schemes");
  }
  require_length(scheme.n(), y.size(), "attainable_alphas");
  auto values = enumerate_statistics(scheme, y, stat);
  std::sort(values.begin(), values.end(), std::greater<>());
  std::vector<Rational> levels;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i + 1 == values.size() || values[i] != values[i + 1]) {
      levels.emplace_back(static_cast<std::int64_t>(i + 1), scheme.size());
    }
  }
  return levels;
}

Rational min_pvalue(const RandomizationScheme& scheme) {
  if (!scheme.uniform()) throw InvalidArgument("min_pvalue: defined for uniform schemes");
  return Rational(1, scheme.size());
}

nlohmann::json TestReport::to_json() const {
  nlohmann::json j;
  j["observed_T"] = observed_stat;
  if (p.has_exact) {
    j["p"] = {{"num", p.count}, {"den", p.of}};
  } else {
    j["p"] = nullptr;
  }
  j["p_value"] = p.value;
  j["size"] = family_size;
  j["k"] = threshold_index;
  j["threshold"] = threshold_value;
  j["reject"] = reject;
  j["alpha"] = alpha;
  j["method"] = method == Method::exact_enumeration ? "exact_enumeration" : "monte_carlo";
  j["method_valid"] = method_valid;
  return j;
}

TestReport TestReport::from_json(const nlohmann::json& j) {
  TestReport r;
  r.observed_stat = j.at("observed_T").get<double>();
  if (!j.at("p").is_null()) {
    r.p.count = j.at("p").at("num").get<std::int64_t>();
    r.p.of = j.at("p").at("den").get<std::int64_t>();
    r.p.exact = Rational(r.p.count, r.p.of);
    r.p.has_exact = true;
  } else {
    r.p = PValue{Rational{}, 0, 0, 0.0, false};
  }
  r.p.value = j.at("p_value").get<double>();
  r.family_size = j.at("size").get<std::int64_t>();
  r.threshold_index = j.at("k").get<std::int64_t>();
  r.threshold_value = j.at("threshold").get<double>();
  r.reject = j.at("reject").get<bool>();
  r.alpha = j.at("alpha").get<double>();
  r.method = j.at("method").get<std::string>() == "monte_carlo" ? Method::monte_carlo
                                                                : Method::exact_enumeration;
  r.method_valid = j.at("method_valid").get<bool>();
  return r;
}

}  // namespace randtest
