#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "randtest/pattern.hpp"
#include "randtest/rational.hpp"
#include "randtest/rng.hpp"
#include "randtest/scheme.hpp"
#include "randtest/statistics.hpp"
#include "randtest/transform.hpp"

namespace randtest {

// The two families implemented here share the same order-statistic skeleton
// but rest on different arguments:
//
//   randomization_* : validity comes from the experimenter's draw of the
//     treatment pattern from a declared finite set W. No algebraic structure
//     is needed; any nonempty W works, including sets larger than the
//     balanced designs (finer p-value resolution).
//
//   group_invariance_* : validity comes from distributional invariance of
//     the data under a transformation set G, and the argument needs
//     G g = G for every g, i.e. an algebraic group. The safe entry point refuses
//     element sets that fail the axioms; the unsafe one exists to measure
//     what goes wrong when they do.
//
// Counting (p-value) uses ">=" and the threshold rule uses strict ">",
// both verbatim; with all-distinct statistic values they agree via
// reject  <=>  p * R <= floor(alpha * R).

enum class Method { exact_enumeration, monte_carlo };

// Exact fraction where the law is uniform; a weighted scheme only yields the
// real number. `count`/`of` keep the raw tail count over R (serialized as
// num/den, so the denominator is always the declared R); `exact` is the same
// fraction in lowest terms for comparisons.
struct PValue {
  Rational exact{1, 1};
  std::int64_t count = 1;  // |{w : T(w,y) >= T_obs}|
  std::int64_t of = 1;     // R (or |G|)
  double value = 1.0;
  bool has_exact = true;

  friend bool operator==(const PValue&, const PValue&) = default;
};

struct TestReport {
  double observed_stat = 0;
  PValue p;
  std::int64_t family_size = 0;     // R or |G|
  std::int64_t threshold_index = 0; // k = ceil((1-alpha) * family_size)
  double threshold_value = 0;       // k-th smallest enumerated statistic
  bool reject = false;
  double alpha = 0;
  Method method = Method::exact_enumeration;
  bool method_valid = true;  // false only for the unsafe path on a non-group

  nlohmann::json to_json() const;
  static TestReport from_json(const nlohmann::json& j);
  friend bool operator==(const TestReport&, const TestReport&) = default;
};

// floor(alpha * size), guarded so an alpha passed as the double nearest to an
// exact fraction j/size lands on the boundary instead of one below it. This
// is the number of top-ranked patterns a level-alpha test may reject on.
std::int64_t allowed_count(double alpha, std::int64_t size);

// k = ceil((1-alpha) * size) = size - allowed_count(alpha, size).
std::int64_t threshold_rank(double alpha, std::int64_t size);

// Exact p-value |{w in W : T(w,y) >= T(w_obs,y)}| / R (weighted: total weight
// of that set). Throws DesignViolation if w_obs is not a member of the
// declared scheme and EnumerationInfeasible on sampling-only schemes.
PValue randomization_pvalue(const RandomizationScheme& scheme, const AssignmentPattern& w_obs,
                            std::span<const double> y, const StatisticSpec& stat);
PValue randomization_pvalue(const RandomizationScheme& scheme, const AssignmentPattern& w_obs,
                            const AssignmentPattern& y, const StatisticSpec& stat);

// Threshold-form test: reject iff T(w_obs,y) strictly exceeds the k-th order
// statistic over the scheme. Defined for uniform schemes; weighted schemes
// are directed to the p-value form.
TestReport randomization_test(const RandomizationScheme& scheme, const AssignmentPattern& w_obs,
                              std::span<const double> y, const StatisticSpec& stat, double alpha);

// Group invariance test on T(x) = stat(split, x): computes T(gx) for every
// g in G and rejects iff T(x) strictly exceeds the k-th order statistic.
// `split` is the fixed unit labelling that turns the two-argument statistic
// into a function of x alone (all-ones gives the plain sum for sign-flip
// tests). Unvalidated element sets are checked; failures throw
// GroupStructureViolation naming the axiom and a witness.
TestReport group_invariance_test(const TransformationGroup& group, std::span<const double> x,
                                 const StatisticSpec& stat, const AssignmentPattern& split,
                                 double alpha);

// Same computation with the group check bypassed. The report is marked
// method-invalid when the element set is not a group; it exists to reproduce
// the balanced-permutation pathology, not for analysis.
TestReport group_invariance_test_unsafe(const TransformationGroup& elements,
                                        std::span<const double> x, const StatisticSpec& stat,
                                        const AssignmentPattern& split, double alpha);

// Decision-only fast paths (no sort, no report); bit-identical decisions to
// the full reports. Used by simulation studies.
bool group_invariance_rejects(const TransformationGroup& group, std::span<const double> x,
                              const StatisticSpec& stat, const AssignmentPattern& split,
                              double alpha, bool skip_validation = false);

// Monte Carlo p-value (1 + #{j <= m : T_j >= T_obs}) / (m + 1); the +1 keeps
// the test exact-in-expectation (the observed arrangement counts itself).
Rational monte_carlo_pvalue(const RandomizationScheme& scheme, const AssignmentPattern& w_obs,
                            std::span<const double> y, const StatisticSpec& stat, int draws,
                            SplitMix64& rng);
Rational monte_carlo_pvalue(const TransformationGroup& group, std::span<const double> x,
                            const StatisticSpec& stat, const AssignmentPattern& split, int draws,
                            SplitMix64& rng);

// All levels at which the test is exact for this y: the ascending tail
// probabilities |{w : T(w,y) >= t}| / R over distinct statistic values t.
// Includes the trivial level 1 (the classical attainable set omits it).
std::vector<Rational> attainable_alphas(const RandomizationScheme& scheme,
                                        const StatisticSpec& stat, std::span<const double> y);

// 1/R: the resolution floor of the scheme's p-values.
Rational min_pvalue(const RandomizationScheme& scheme);

}  // namespace randtest
