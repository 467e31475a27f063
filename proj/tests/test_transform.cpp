#include "doctest.h"

#include <algorithm>
#include <numeric>
#include <set>
#include <vector>

#include <nlohmann/json.hpp>

#include "randtest/errors.hpp"
#include "randtest/rng.hpp"
#include "randtest/transform.hpp"

using namespace randtest;

namespace {

Transformation random_permutation(int n, SplitMix64& rng) {
  std::vector<std::uint8_t> image(static_cast<std::size_t>(n));
  std::iota(image.begin(), image.end(), std::uint8_t{0});
  for (int i = n - 1; i > 0; --i) {
    const auto j = rng.next_below(static_cast<std::uint64_t>(i) + 1);
    std::swap(image[static_cast<std::size_t>(i)], image[static_cast<std::size_t>(j)]);
  }
  return Transformation::permutation(std::move(image));
}

std::vector<double> random_vector(int n, SplitMix64& rng) {
  std::vector<double> x(static_cast<std::size_t>(n));
  for (auto& v : x) v = rng.next_normal();
  return x;
}

// Brute-force oracle for the balanced-permutation count: filter S_n by the
// half-displacement predicate, independently of the library implementation.
int count_balanced_oracle(int cases) {
  const int n = 2 * cases;
  std::vector<int> image(static_cast<std::size_t>(n));
  std::iota(image.begin(), image.end(), 0);
  int count = 0;
  do {
    int displaced = 0;
    for (int i = 0; i < cases; ++i) {
      if (image[static_cast<std::size_t>(i)] >= cases) ++displaced;
    }
    if (displaced == cases / 2) ++count;
  } while (std::next_permutation(image.begin(), image.end()));
  return count;
}

}  // namespace

TEST_CASE("apply: identity, sign flips, permutation") {
  const std::vector<double> x = {1.0, -2.0};
  CHECK(Transformation::identity(Transformation::Kind::permutation, 2).apply(x) == x);
  CHECK(Transformation::identity(Transformation::Kind::sign_flip, 2).apply(x) == x);

  const auto all_neg = Transformation::sign_flip(0b11, 2);
  CHECK(all_neg.apply(x) == std::vector<double>{-1.0, 2.0});

  // (a,b,c) -> (b,c,a): output position i takes x[pi_i] with pi = (2,3,1)
  const auto rot = Transformation::permutation({1, 2, 0});
  const std::vector<double> abc = {10.0, 20.0, 30.0};
  CHECK(rot.apply(abc) == std::vector<double>{20.0, 30.0, 10.0});

  CHECK_THROWS_AS(rot.apply(x), InvalidArgument);
}

TEST_CASE("composition law: apply(g o h, x) == apply(g, apply(h, x))") {
  auto rng = substream(31, 0);
  for (int n = 2; n <= 8; ++n) {
    for (int rep = 0; rep < 50; ++rep) {
      const auto g = random_permutation(n, rng);
      const auto h = random_permutation(n, rng);
      const auto x = random_vector(n, rng);
      CHECK(g.compose(h).apply(x) == g.apply(h.apply(x)));
    }
  }
  for (int rep = 0; rep < 50; ++rep) {
    const auto g = Transformation::sign_flip(rng.next_below(16), 4);
    const auto h = Transformation::sign_flip(rng.next_below(16), 4);
    const auto x = random_vector(4, rng);
    CHECK(g.compose(h).apply(x) == g.apply(h.apply(x)));
  }
}

TEST_CASE("inverse undoes the transformation") {
  auto rng = substream(32, 0);
  for (int rep = 0; rep < 50; ++rep) {
    const auto g = random_permutation(6, rng);
    CHECK(g.compose(g.inverse()).is_identity());
    CHECK(g.inverse().compose(g).is_identity());
  }
  const auto s = Transformation::sign_flip(0b0101, 4);
  CHECK(s.compose(s.inverse()).is_identity());
}

TEST_CASE("transformation validation") {
  CHECK_THROWS_AS(Transformation::permutation({0, 0, 1}), InvalidArgument);
  CHECK_THROWS_AS(Transformation::permutation({0, 3}), InvalidArgument);
  CHECK_THROWS_AS(Transformation::sign_flip(0b100, 2), InvalidArgument);
  CHECK_THROWS_AS(Transformation::permutation(std::vector<std::uint8_t>(17, 0)), InvalidArgument);
}

TEST_CASE("check_group accepts true groups") {
  CHECK(check_group(symmetric_group(3)).is_group());
  CHECK(check_group(symmetric_group(4)).is_group());
  CHECK(check_group(sign_flip_group(3)).is_group());  // all 2^3 sign-flip maps

  const auto cyc = cyclic_group(Transformation::permutation({1, 2, 0}));
  CHECK(cyc.elements.size() == 3);
  CHECK(check_group(cyc).is_group());

  const auto trivial = cyclic_group(Transformation::identity(Transformation::Kind::permutation, 4));
  CHECK(trivial.elements.size() == 1);
  CHECK(check_group(trivial).is_group());
}

TEST_CASE("check_group rejects a punctured permutation group with a verified witness") {
  auto g = symmetric_group(3);
  // drop one non-identity element
  const auto removed = g.elements[3];
  REQUIRE(!removed.is_identity());
  g.elements.erase(g.elements.begin() + 3);
  g.validated = false;
  const auto report = check_group(g);
  CHECK(!report.is_group());
  CHECK(report.has_identity);
  // every reported witness really composes to something outside the set
  std::set<std::uint64_t> keys;
  for (const auto& e : g.elements) keys.insert(e.key());
  CHECK((!report.closed || !report.has_inverses));
  for (const auto& [a, b] : report.closure_witnesses) {
    CHECK(!keys.contains(a.compose(b).key()));
  }
  for (const auto& e : report.inverse_witnesses) {
    CHECK(!keys.contains(e.inverse().key()));
  }
}

TEST_CASE("balanced permutations: counts, identity, non-closure") {
  const auto bp = balanced_permutations(2, 2);
  CHECK(static_cast<int>(bp.elements.size()) == count_balanced_oracle(2));
  CHECK(!bp.validated);
  for (const auto& e : bp.elements) CHECK(!e.is_identity());

  const auto report = check_group(bp);
  CHECK(!report.is_group());
  CHECK(!report.has_identity);
  CHECK(!report.closed);
  REQUIRE(!report.closure_witnesses.empty());

  std::set<std::uint64_t> keys;
  for (const auto& e : bp.elements) keys.insert(e.key());
  for (const auto& [g, h] : report.closure_witnesses) {
    CHECK(!keys.contains(g.compose(h).key()));
  }

  // composing an element with its inverse fixes every case position: a
  // concrete non-closure witness
  const auto& g = bp.elements.front();
  CHECK(g.compose(g.inverse()).is_identity());
  CHECK(!keys.contains(g.compose(g.inverse()).key()));

  CHECK_THROWS_AS(balanced_permutations(2, 4), InvalidArgument);
  CHECK_THROWS_AS(balanced_permutations(3, 3), InvalidArgument);
  CHECK_THROWS_AS(balanced_permutations(6, 6), EnumerationInfeasible);
}

TEST_CASE("check_group input validation") {
  TransformationGroup empty{3, "empty", {}, false};
  CHECK_THROWS_AS(check_group(empty), InvalidArgument);

  TransformationGroup mixed{2, "mixed",
                            {Transformation::identity(Transformation::Kind::permutation, 2),
                             Transformation::identity(Transformation::Kind::sign_flip, 2)},
                            false};
  CHECK_THROWS_AS(check_group(mixed), InvalidArgument);

  TransformationGroup dup{2, "dup",
                          {Transformation::sign_flip(1, 2), Transformation::sign_flip(1, 2)},
                          false};
  CHECK_THROWS_AS(check_group(dup), InvalidArgument);
}

TEST_CASE("group builders") {
  CHECK(symmetric_group(4).elements.size() == 24);
  CHECK(sign_flip_group(5).elements.size() == 32);
  CHECK(symmetric_group(4).validated);
  CHECK_THROWS_AS(symmetric_group(9), EnumerationInfeasible);
  CHECK_THROWS_AS(sign_flip_group(0), InvalidArgument);
}

TEST_CASE("group check report JSON round trip") {
  const auto report = check_group(balanced_permutations(2, 2));
  const auto back = GroupCheckReport::from_json(report.to_json());
  CHECK(back == report);

  const auto good = check_group(symmetric_group(3));
  CHECK(GroupCheckReport::from_json(good.to_json()) == good);
}

TEST_CASE("describe_failure names axioms") {
  const auto report = check_group(balanced_permutations(2, 2));
  const auto msg = report.describe_failure();
  CHECK(msg.find("identity") != std::string::npos);
  CHECK(msg.find("closed") != std::string::npos);
}
