#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "randtest/pattern.hpp"
#include "randtest/transform.hpp"

namespace randtest {

// Response vector: one real per unit, finite entries, length n.
using OutcomeVector = std::vector<double>;

enum class StatKind { fisher_match, diff_sums, centered_diff, abs_mean_diff };
enum class Sidedness { upper, two_sided };

// A named test statistic T(w, y) plus its rejection direction. Two-sided
// testing transforms the statistic (absolute value) instead of doubling a
// p-value, so the single upper-tail machinery serves both modes.
struct StatisticSpec {
  StatKind kind = StatKind::diff_sums;
  Sidedness sided = Sidedness::upper;

  // CLI names: "fisher-match", "diff-sums", "centered-diff", "abs-mean-diff"
  // and "upper" / "two-sided".
  static StatisticSpec parse(std::string_view kind_name, std::string_view sided_name = "upper");
  std::string name() const;
  void validate() const;  // fisher-match is upper-only

  friend bool operator==(const StatisticSpec&, const StatisticSpec&) = default;
};

// Number of positions where both indicator vectors are 1 (Fisher's count of
// correct identifications).
int fisher_match(const AssignmentPattern& w, const AssignmentPattern& y);

// Sum of treated responses minus sum of untreated responses.
double diff_sums(const AssignmentPattern& w, std::span<const double> y);

// Same difference after centering every response at the overall mean; equal
// to diff_sums on balanced patterns and identically 0 on constant ones.
double centered_diff(const AssignmentPattern& w, std::span<const double> y);

// Absolute difference of the two group means. Requires both groups nonempty.
double abs_mean_diff(const AssignmentPattern& w, std::span<const double> y);

// Evaluates the named statistic; for fisher_match the responses must be
// exactly 0 or 1. The mask overload is the enumeration hot path.
double evaluate(const StatisticSpec& spec, const AssignmentPattern& w, std::span<const double> y);
double evaluate(const StatisticSpec& spec, std::uint64_t w_mask, int n, std::span<const double> y);

// Permuted or sign-flipped copy of x; the input is untouched.
inline std::vector<double> apply_transformation(const Transformation& g, std::span<const double> x) {
  return g.apply(x);
}

}  // namespace randtest
