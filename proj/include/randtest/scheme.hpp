#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "randtest/pattern.hpp"
#include "randtest/rng.hpp"

namespace randtest {

// A randomization scheme: the finite set W of admissible treatment patterns,
// declared before the experiment, together with the law the experimenter
// draws from (uniform unless stated otherwise).
//
// Schemes are immutable after construction and safe to share across threads.
// Up to kMaxEnumerationUnits the pattern list is materialized eagerly; larger
// schemes stay implicit: sampling and membership work, enumeration throws
// EnumerationInfeasible.
class RandomizationScheme {
 public:
  static constexpr int kMaxEnumerationUnits = 24;

  enum class Family {
    custom,
    forced_balance,
    bernoulli,
    bernoulli_no_constants,
    covariate_uniform,
    covariate_sequential,
  };

  int n() const { return n_; }
  const std::string& label() const { return label_; }
  Family family() const { return family_; }

  // R = |W|. Known in closed form even when the scheme is not enumerable.
  std::int64_t size() const { return size_; }

  bool uniform() const { return weights_.empty(); }
  bool enumerable() const { return !masks_.empty() || size_ == 0; }

  // Pattern list in enumeration order; throws EnumerationInfeasible when the
  // scheme is sampling-only.
  std::span<const std::uint64_t> masks() const;
  AssignmentPattern pattern(std::int64_t index) const;

  // Per-pattern probabilities; empty span means uniform 1/R.
  std::span<const double> weights() const { return weights_; }
  double weight(std::int64_t index) const;

  bool contains(const AssignmentPattern& w) const;

  // One draw from the scheme's law. Deterministic given the stream state.
  AssignmentPattern sample(SplitMix64& rng) const;

  nlohmann::json to_json() const;
  static RandomizationScheme from_json(const nlohmann::json& j);

  // Observable equality: same n, label, pattern list and effective weights.
  friend bool operator==(const RandomizationScheme& a, const RandomizationScheme& b);

 private:
  friend RandomizationScheme forced_balance_scheme(int n);
  friend RandomizationScheme bernoulli_scheme(int n, bool exclude_constants);
  friend RandomizationScheme custom_scheme(const std::vector<AssignmentPattern>& patterns,
                                           const std::vector<double>& weights,
                                           std::string label);
  friend RandomizationScheme covariate_balanced_scheme(int n, const AssignmentPattern& stratum,
                                                       std::string_view mode);
  friend RandomizationScheme ltt_scheme(int m);

  RandomizationScheme() = default;

  int n_ = 0;
  std::string label_;
  Family family_ = Family::custom;
  std::int64_t size_ = 0;
  std::uint64_t stratum_mask_ = 0;  // covariate families only
  std::vector<std::uint64_t> masks_;
  std::vector<double> weights_;      // empty when uniform
  std::vector<double> cumulative_;   // sampling table, weighted enumerable case
};

// All patterns with exactly n/2 treated units; the standard forced balance
// trial. Requires even n >= 2.
RandomizationScheme forced_balance_scheme(int n);

// The Bernoulli trial {0,1}^n; optionally drops the two constant patterns
// (under which a centered statistic carries no information).
RandomizationScheme bernoulli_scheme(int n, bool exclude_constants);

// An arbitrary declared pattern set, optionally weighted. Patterns must be
// distinct and of equal length; weights, when given, positive and summing
// to 1 within 1e-12.
RandomizationScheme custom_scheme(const std::vector<AssignmentPattern>& patterns,
                                  const std::vector<double>& weights = {},
                                  std::string label = "custom");

// Bernoulli-style trial with enforced covariate balance: the treated count in
// the stratum marked by `stratum` always equals the treated count outside it.
// mode "uniform" puts mass 1/R on each pattern; mode "sequential" uses the
// two-step law P(w) = 2^(-n/2) / C(n/2, l(w)) induced by assigning the marked
// stratum independently and then matching the count in the other stratum.
// Requires n divisible by 4 and a stratum with exactly n/2 ones.
RandomizationScheme covariate_balanced_scheme(int n, const AssignmentPattern& stratum,
                                              std::string_view mode = "uniform");

// Lady-tasting-tea design: length-2m patterns with exactly m ones.
RandomizationScheme ltt_scheme(int m);

// Spec'd operation name for drawing one pattern.
AssignmentPattern sample_pattern(const RandomizationScheme& scheme, SplitMix64& rng);

// Built-in scheme registry used by the CLI and the simulation config:
// "forced-balance", "bernoulli", "bernoulli-nc", "ltt",
// "covariate-balanced" (alias ":uniform") and "covariate-balanced:sequential"
// (stratum = first n/2 units).
RandomizationScheme make_scheme(std::string_view name, int n);

}  // namespace randtest
