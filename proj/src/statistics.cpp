#include "randtest/statistics.hpp"

#include <bit>
#include <cmath>

#include "randtest/errors.hpp"

namespace randtest {

namespace {

void require_equal_length(int wn, std::size_t yn, const char* who) {
  if (wn != static_cast<int>(yn)) {
    throw InvalidArgument(std::string(who) + ": pattern and responses must have equal length");
  }
}

// Signed single-pass sum: +y_i on treated units, -y_i on untreated. One
// formula for both diff statistics keeps T(w,y) = -T(~w,y) exact in floating
// point, so complementary patterns tie only when the statistic is truly 0.
double signed_sum(std::uint64_t w_mask, std::span<const double> y, double center) {
  double acc = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double d = y[i] - center;
    acc += ((w_mask >> i) & 1u) ? d : -d;
  }
  return acc;
}

double mean(std::span<const double> y) {
  double acc = 0;
  for (const double v : y) acc += v;
  return acc / static_cast<double>(y.size());
}

}  // namespace

StatisticSpec StatisticSpec::parse(std::string_view kind_name, std::string_view sided_name) {
  StatisticSpec spec;
  if (kind_name == "fisher-match") {
    spec.kind = StatKind::fisher_match;
  } else if (kind_name == "diff-sums") {
    spec.kind = StatKind::diff_sums;
  } else if (kind_name == "centered-diff") {
    spec.kind = StatKind::centered_diff;
  } else if (kind_name == "abs-mean-diff") {
    spec.kind = StatKind::abs_mean_diff;
  } else {
    throw InvalidArgument("unknown statistic '" + std::string(kind_name) + "'");
  }
  if (sided_name == "upper") {
    spec.sided = Sidedness::upper;
  } else if (sided_name == "two-sided") {
    spec.sided = Sidedness::two_sided;
  } else {
    throw InvalidArgument("sidedness must be 'upper' or 'two-sided'");
  }
  spec.validate();
  return spec;
}

std::string StatisticSpec::name() const {
  std::string out;
  switch (kind) {
    case StatKind::fisher_match: out = "fisher-match"; break;
    case StatKind::diff_sums: out = "diff-sums"; break;
    case StatKind::centered_diff: out = "centered-diff"; break;
    case StatKind::abs_mean_diff: out = "abs-mean-diff"; break;
  }
  return out + (sided == Sidedness::upper ? ":upper" : ":two-sided");
}

void StatisticSpec::validate() const {
  if (kind == StatKind::fisher_match && sided != Sidedness::upper) {
    throw InvalidArgument("fisher-match is an upper-tail statistic only");
  }
}

int fisher_match(const AssignmentPattern& w, const AssignmentPattern& y) {
  if (w.n() != y.n()) throw InvalidArgument("fisher_match: length mismatch");
  return std::popcount(w.mask() & y.mask());
}

double diff_sums(const AssignmentPattern& w, std::span<const double> y) {
  require_equal_length(w.n(), y.size(), "diff_sums");
  return signed_sum(w.mask(), y, 0.0);
}

double centered_diff(const AssignmentPattern& w, std::span<const double> y) {
  require_equal_length(w.n(), y.size(), "centered_diff");
  return signed_sum(w.mask(), y, mean(y));
}

double abs_mean_diff(const AssignmentPattern& w, std::span<const double> y) {
  require_equal_length(w.n(), y.size(), "abs_mean_diff");
  const int n1 = w.ones();
  const int n0 = w.n() - n1;
  if (n1 == 0 || n0 == 0) {
    throw InvalidArgument("abs_mean_diff: both groups must be nonempty");
  }
  double s1 = 0, s0 = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if ((w.mask() >> i) & 1u) {
      s1 += y[i];
    } else {
      s0 += y[i];
    }
  }
  return std::abs(s1 / n1 - s0 / n0);
}

double evaluate(const StatisticSpec& spec, std::uint64_t w_mask, int n, std::span<const double> y) {
  require_equal_length(n, y.size(), "evaluate");
  double value = 0;
  switch (spec.kind) {
    case StatKind::fisher_match: {
      std::uint64_t y_mask = 0;
      for (std::size_t i = 0; i < y.size(); ++i) {
        if (y[i] == 1.0) {
          y_mask |= std::uint64_t{1} << i;
        } else if (y[i] != 0.0) {
          throw InvalidArgument("fisher-match: responses must be exactly 0 or 1");
        }
      }
      value = static_cast<double>(std::popcount(w_mask & y_mask));
      break;
    }
    case StatKind::diff_sums:
      value = signed_sum(w_mask, y, 0.0);
      break;
    case StatKind::centered_diff:
      value = signed_sum(w_mask, y, mean(y));
      break;
    case StatKind::abs_mean_diff:
      value = abs_mean_diff(AssignmentPattern(w_mask, n), y);
      break;
  }
  return spec.sided == Sidedness::two_sided ? std::abs(value) : value;
}

double evaluate(const StatisticSpec& spec, const AssignmentPattern& w, std::span<const double> y) {
  return evaluate(spec, w.mask(), w.n(), y);
}

}  // namespace randtest
