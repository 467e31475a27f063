#include "doctest.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <set>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>
#include <nlohmann/json.hpp>

#include "randtest/combinatorics.hpp"
#include "randtest/errors.hpp"
#include "randtest/scheme.hpp"

using namespace randtest;

namespace {

std::set<std::string> pattern_strings(const RandomizationScheme& s) {
  std::set<std::string> out;
  for (std::int64_t i = 0; i < s.size(); ++i) out.insert(s.pattern(i).str());
  return out;
}

// Weights sum to 1 and the enumeration yields R distinct patterns.
void check_scheme_invariants(const RandomizationScheme& s) {
  const auto masks = s.masks();
  REQUIRE(static_cast<std::int64_t>(masks.size()) == s.size());
  std::set<std::uint64_t> distinct(masks.begin(), masks.end());
  CHECK(static_cast<std::int64_t>(distinct.size()) == s.size());
  double sum = 0;
  for (std::int64_t i = 0; i < s.size(); ++i) {
    REQUIRE(s.weight(i) > 0);
    sum += s.weight(i);
  }
  CHECK(std::abs(sum - 1.0) <= 1e-12);
}

double chi_square_gof(const std::map<std::uint64_t, int>& counts,
                      const RandomizationScheme& s, int draws) {
  double stat = 0;
  for (std::int64_t i = 0; i < s.size(); ++i) {
    const double expected = s.weight(i) * draws;
    const auto it = counts.find(s.masks()[static_cast<std::size_t>(i)]);
    const double observed = it == counts.end() ? 0.0 : it->second;
    stat += (observed - expected) * (observed - expected) / expected;
  }
  return stat;
}

}  // namespace

TEST_CASE("forced balance sizes") {
  CHECK(forced_balance_scheme(8).size() == 70);

  const auto tiny = forced_balance_scheme(2);
  CHECK(tiny.size() == 2);
  CHECK(pattern_strings(tiny) == std::set<std::string>{"01", "10"});

  // independent enumeration oracle at n = 4
  int oracle = 0;
  for (std::uint64_t m = 0; m < 16; ++m) {
    if (std::popcount(m) == 2) ++oracle;
  }
  CHECK(oracle == 6);
  CHECK(forced_balance_scheme(4).size() == oracle);

  // independent binomial routine: Pascal's triangle, addition only
  long long pascal[17][17] = {};
  for (int n = 0; n <= 16; ++n) {
    pascal[n][0] = 1;
    for (int k = 1; k <= n; ++k) pascal[n][k] = pascal[n - 1][k - 1] + pascal[n - 1][k];
  }
  for (int n = 2; n <= 16; n += 2) {
    CHECK(forced_balance_scheme(n).size() == pascal[n][n / 2]);
  }

  CHECK_THROWS_AS(forced_balance_scheme(7), InvalidArgument);
  CHECK_THROWS_AS(forced_balance_scheme(0), InvalidArgument);
  CHECK_THROWS_AS(forced_balance_scheme(-2), InvalidArgument);
}

TEST_CASE("bernoulli sizes") {
  CHECK(bernoulli_scheme(8, true).size() == 254);
  CHECK(bernoulli_scheme(8, false).size() == 256);

  const auto tiny = bernoulli_scheme(2, true);
  CHECK(tiny.size() == 2);
  CHECK(pattern_strings(tiny) == std::set<std::string>{"01", "10"});

  CHECK_THROWS_AS(bernoulli_scheme(1, true), InvalidArgument);
  CHECK_THROWS_AS(bernoulli_scheme(0, false), InvalidArgument);
  CHECK(bernoulli_scheme(1, false).size() == 2);
}

TEST_CASE("custom schemes") {
  // 69 of the 70 balanced patterns still form a valid scheme
  const auto full = forced_balance_scheme(8);
  std::vector<AssignmentPattern> sixty_nine;
  for (std::int64_t i = 1; i < full.size(); ++i) sixty_nine.push_back(full.pattern(i));
  CHECK(custom_scheme(sixty_nine).size() == 69);

  const auto single = custom_scheme({AssignmentPattern::parse("1100")});
  CHECK(single.size() == 1);

  const std::vector<AssignmentPattern> three = {AssignmentPattern::parse("10"),
                                                AssignmentPattern::parse("01"),
                                                AssignmentPattern::parse("11")};
  const auto weighted = custom_scheme(three, {0.5, 0.25, 0.25});
  CHECK(!weighted.uniform());
  CHECK(weighted.weight(0) == 0.5);
  check_scheme_invariants(weighted);

  CHECK_THROWS_AS(custom_scheme({}), InvalidArgument);
  CHECK_THROWS_AS(custom_scheme({AssignmentPattern::parse("10"), AssignmentPattern::parse("10")}),
                  InvalidArgument);
  CHECK_THROWS_AS(custom_scheme({AssignmentPattern::parse("10"), AssignmentPattern::parse("011")}),
                  InvalidArgument);
  CHECK_THROWS_AS(custom_scheme(three, {0.5, 0.5}), InvalidArgument);
  CHECK_THROWS_AS(custom_scheme(three, {0.5, 0.3, 0.3}), InvalidArgument);
  CHECK_THROWS_AS(custom_scheme(three, {0.5, -0.25, 0.75}), InvalidArgument);
}

TEST_CASE("covariate balanced scheme counts") {
  const auto stratum8 = AssignmentPattern::parse("11110000");

  // oracle: direct evaluation of the stratified pattern count
  std::int64_t sum = 0;
  for (int l = 0; l <= 4; ++l) sum += binomial(4, l) * binomial(4, l);
  CHECK(sum == 70);

  const auto uniform = covariate_balanced_scheme(8, stratum8, "uniform");
  CHECK(uniform.size() == sum);
  CHECK(uniform.size() == binomial(8, 4));  // Vandermonde cross-check
  CHECK(uniform.uniform());
  check_scheme_invariants(uniform);

  // forced balance within both strata is a strictly smaller design
  int within_strata = 0;
  for (const std::uint64_t m : uniform.masks()) {
    if (std::popcount(m & stratum8.mask()) == 2) ++within_strata;
  }
  CHECK(within_strata == binomial(4, 2) * binomial(4, 2));
  CHECK(within_strata == 36);
  CHECK(within_strata < uniform.size());

  CHECK_THROWS_AS(covariate_balanced_scheme(6, AssignmentPattern::parse("111000")),
                  InvalidArgument);
  CHECK_THROWS_AS(covariate_balanced_scheme(8, AssignmentPattern::parse("11100000")),
                  InvalidArgument);
  CHECK_THROWS_AS(covariate_balanced_scheme(8, stratum8, "other"), InvalidArgument);
}

TEST_CASE("covariate sequential weights follow the two-step law") {
  const auto stratum = AssignmentPattern::parse("1100");
  const auto seq = covariate_balanced_scheme(4, stratum, "sequential");
  CHECK(seq.size() == 6);
  CHECK(!seq.uniform());
  check_scheme_invariants(seq);

  // Hand-computed: P(w) = 2^-2 / C(2, l).  l=0 or 2 -> 1/4, l=1 -> 1/8.
  std::map<std::string, double> law;
  for (std::int64_t i = 0; i < seq.size(); ++i) law[seq.pattern(i).str()] = seq.weight(i);
  CHECK(law.at("0000") == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(law.at("1111") == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(law.at("1010") == doctest::Approx(0.125).epsilon(1e-14));
  CHECK(law.at("1001") == doctest::Approx(0.125).epsilon(1e-14));
  CHECK(law.at("0110") == doctest::Approx(0.125).epsilon(1e-14));
  CHECK(law.at("0101") == doctest::Approx(0.125).epsilon(1e-14));
}

TEST_CASE("ltt scheme") {
  const auto s = ltt_scheme(4);
  CHECK(s.size() == 70);
  CHECK(pattern_strings(s) == pattern_strings(forced_balance_scheme(8)));
  CHECK(ltt_scheme(1).size() == 2);

  // m = 3 oracle: enumerate all 6-bit strings with three ones
  int oracle = 0;
  for (std::uint64_t m = 0; m < 64; ++m) {
    if (std::popcount(m) == 3) ++oracle;
  }
  CHECK(oracle == 20);
  CHECK(ltt_scheme(3).size() == oracle);
  CHECK_THROWS_AS(ltt_scheme(0), InvalidArgument);
}

TEST_CASE("built-in schemes satisfy the enumeration invariants") {
  check_scheme_invariants(forced_balance_scheme(8));
  check_scheme_invariants(bernoulli_scheme(6, true));
  check_scheme_invariants(bernoulli_scheme(6, false));
  check_scheme_invariants(covariate_balanced_scheme(8, AssignmentPattern::parse("10101010")));
  check_scheme_invariants(ltt_scheme(3));
}

TEST_CASE("uniform sampling frequencies: 5 sigma band") {
  const auto s = forced_balance_scheme(8);
  auto rng = substream(2024, 0);
  std::map<std::uint64_t, int> counts;
  const int draws = 70000;
  for (int i = 0; i < draws; ++i) ++counts[s.sample(rng).mask()];
  const double expected = 1000.0;
  const double sigma = std::sqrt(draws * (1.0 / 70) * (69.0 / 70));
  for (const std::uint64_t m : s.masks()) {
    CAPTURE(m);
    CHECK(std::abs(counts[m] - expected) <= 5 * sigma);
  }
}

TEST_CASE("degenerate single-pattern scheme always samples the pattern") {
  const auto s = custom_scheme({AssignmentPattern::parse("110")});
  auto rng = substream(5, 5);
  for (int i = 0; i < 50; ++i) CHECK(s.sample(rng).str() == "110");
}

TEST_CASE("sequential sampling matches the two-step law: 5 sigma band") {
  const auto s = covariate_balanced_scheme(4, AssignmentPattern::parse("1100"), "sequential");
  auto rng = substream(99, 1);
  std::map<std::uint64_t, int> counts;
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) ++counts[s.sample(rng).mask()];
  for (std::int64_t i = 0; i < s.size(); ++i) {
    const double p = s.weight(i);
    const double sigma = std::sqrt(draws * p * (1 - p));
    CAPTURE(s.pattern(i).str());
    CHECK(std::abs(counts[s.masks()[static_cast<std::size_t>(i)]] - draws * p) <= 5 * sigma);
  }
}

TEST_CASE("sampling goodness of fit stays under the 0.999 chi-square quantile") {
  const int draws = 100000;
  const auto check_fit = [&](const RandomizationScheme& s, std::uint64_t key) {
    auto rng = substream(777, key);
    std::map<std::uint64_t, int> counts;
    for (int i = 0; i < draws; ++i) ++counts[s.sample(rng).mask()];
    const double stat = chi_square_gof(counts, s, draws);
    const boost::math::chi_squared dist(static_cast<double>(s.size() - 1));
    const double cutoff = boost::math::quantile(dist, 0.999);
    CAPTURE(s.label());
    CHECK(stat < cutoff);
  };
  check_fit(forced_balance_scheme(8), 1);
  check_fit(bernoulli_scheme(6, true), 2);
  check_fit(covariate_balanced_scheme(4, AssignmentPattern::parse("1100"), "sequential"), 3);
}

TEST_CASE("large schemes are sampling-only") {
  const auto s = forced_balance_scheme(30);
  CHECK(!s.enumerable());
  CHECK(s.size() == binomial(30, 15));
  CHECK_THROWS_AS(s.masks(), EnumerationInfeasible);
  auto rng = substream(1, 1);
  for (int i = 0; i < 20; ++i) {
    const auto w = s.sample(rng);
    CHECK(w.ones() == 15);
    CHECK(s.contains(w));
  }

  const auto big_seq =
      covariate_balanced_scheme(32, AssignmentPattern((std::uint64_t{1} << 16) - 1, 32),
                                "sequential");
  CHECK(!big_seq.enumerable());
  const auto w = big_seq.sample(rng);
  CHECK(std::popcount(w.mask() & ((std::uint64_t{1} << 16) - 1)) ==
        std::popcount(w.mask() >> 16));
}

TEST_CASE("membership predicates") {
  const auto fb = forced_balance_scheme(6);
  CHECK(fb.contains(AssignmentPattern::parse("110100")));
  CHECK(!fb.contains(AssignmentPattern::parse("110000")));
  CHECK(!fb.contains(AssignmentPattern::parse("1101")));

  const auto nc = bernoulli_scheme(4, true);
  CHECK(nc.contains(AssignmentPattern::parse("1000")));
  CHECK(!nc.contains(AssignmentPattern::parse("0000")));
  CHECK(!nc.contains(AssignmentPattern::parse("1111")));
}

TEST_CASE("scheme JSON round trip") {
  const std::vector<AssignmentPattern> pats = {AssignmentPattern::parse("110"),
                                               AssignmentPattern::parse("011"),
                                               AssignmentPattern::parse("101")};
  const auto weighted = custom_scheme(pats, {0.5, 0.25, 0.25}, "demo");
  const auto back = RandomizationScheme::from_json(weighted.to_json());
  CHECK(back == weighted);

  // uniform weights collapse back to the uniform law
  const auto uniform = custom_scheme(pats, {}, "u");
  const auto uback = RandomizationScheme::from_json(uniform.to_json());
  CHECK(uback == uniform);
  CHECK(uback.uniform());
}

TEST_CASE("make_scheme registry") {
  CHECK(make_scheme("forced-balance", 8).size() == 70);
  CHECK(make_scheme("bernoulli", 8).size() == 256);
  CHECK(make_scheme("bernoulli-nc", 8).size() == 254);
  CHECK(make_scheme("ltt", 8).size() == 70);
  CHECK(make_scheme("covariate-balanced", 8).size() == 70);
  CHECK(make_scheme("covariate-balanced:sequential", 8).uniform() == false);
  CHECK_THROWS_AS(make_scheme("nope", 8), InvalidArgument);
  CHECK_THROWS_AS(make_scheme("ltt", 7), InvalidArgument);
  CHECK_THROWS_AS(make_scheme("covariate-balanced", 6), InvalidArgument);
}
