#include "randtest/scheme.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

#include <nlohmann/json.hpp>

#include "randtest/combinatorics.hpp"
#include "randtest/errors.hpp"

namespace randtest {

namespace {

constexpr double kWeightSumTolerance = 1e-12;

// Masks of n-bit values with exactly k bits set, ascending (Gosper's hack).
std::vector<std::uint64_t> k_subset_masks(int n, int k) {
  std::vector<std::uint64_t> out;
  out.reserve(static_cast<std::size_t>(binomial(n, k)));
  if (k == 0) {
    out.push_back(0);
    return out;
  }
  const std::uint64_t limit = std::uint64_t{1} << n;
  std::uint64_t v = (std::uint64_t{1} << k) - 1;
  while (v < limit) {
    out.push_back(v);
    const std::uint64_t c = v & (0 - v);
    const std::uint64_t r = v + c;
    v = (((r ^ v) >> 2) / c) | r;
  }
  return out;
}

// Uniform k-subset of the given positions, as a mask (partial Fisher-Yates).
std::uint64_t sample_k_subset(std::span<const int> positions, int k, SplitMix64& rng) {
  std::vector<int> pool(positions.begin(), positions.end());
  std::uint64_t mask = 0;
  for (int i = 0; i < k; ++i) {
    const auto j = i + static_cast<int>(rng.next_below(pool.size() - static_cast<std::size_t>(i)));
    std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(j)]);
    mask |= std::uint64_t{1} << pool[static_cast<std::size_t>(i)];
  }
  return mask;
}

std::vector<int> mask_positions(std::uint64_t mask, int n) {
  std::vector<int> out;
  for (int i = 0; i < n; ++i) {
    if ((mask >> i) & 1u) out.push_back(i);
  }
  return out;
}

}  // namespace

std::span<const std::uint64_t> RandomizationScheme::masks() const {
  if (!enumerable()) {
    throw EnumerationInfeasible("scheme '" + label_ + "' has n = " + std::to_string(n_) +
                                " > " + std::to_string(kMaxEnumerationUnits) +
                                ": enumeration refused, use sampling");
  }
  return masks_;
}

AssignmentPattern RandomizationScheme::pattern(std::int64_t index) const {
  return AssignmentPattern(masks()[static_cast<std::size_t>(index)], n_);
}

double RandomizationScheme::weight(std::int64_t index) const {
  if (uniform()) return 1.0 / static_cast<double>(size_);
  return weights_[static_cast<std::size_t>(index)];
}

bool RandomizationScheme::contains(const AssignmentPattern& w) const {
  if (w.n() != n_) return false;
  const std::uint64_t m = w.mask();
  switch (family_) {
    case Family::forced_balance:
      return w.ones() == n_ / 2;
    case Family::bernoulli:
      return true;
    case Family::bernoulli_no_constants:
      return m != 0 && m != ((std::uint64_t{1} << n_) - 1);
    case Family::covariate_uniform:
    case Family::covariate_sequential:
      return std::popcount(m & stratum_mask_) == std::popcount(m & ~stratum_mask_ & ((std::uint64_t{1} << n_) - 1));
    case Family::custom:
      return std::find(masks_.begin(), masks_.end(), m) != masks_.end();
  }
  return false;
}

AssignmentPattern RandomizationScheme::sample(SplitMix64& rng) const {
  if (enumerable()) {
    std::int64_t idx;
    if (uniform()) {
      idx = static_cast<std::int64_t>(rng.next_below(static_cast<std::uint64_t>(size_)));
    } else {
      const double u = rng.next_unit();
      const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
      idx = std::min<std::int64_t>(it - cumulative_.begin(), size_ - 1);
    }
    return AssignmentPattern(masks_[static_cast<std::size_t>(idx)], n_);
  }
  // Implicit (sampling-only) families.
  switch (family_) {
    case Family::forced_balance: {
      std::vector<int> all(static_cast<std::size_t>(n_));
      std::iota(all.begin(), all.end(), 0);
      return AssignmentPattern(sample_k_subset(all, n_ / 2, rng), n_);
    }
    case Family::bernoulli:
      return AssignmentPattern(rng.next_below(std::uint64_t{1} << n_), n_);
    case Family::bernoulli_no_constants: {
      const std::uint64_t full = (std::uint64_t{1} << n_) - 1;
      for (;;) {
        const std::uint64_t m = rng.next_below(std::uint64_t{1} << n_);
        if (m != 0 && m != full) return AssignmentPattern(m, n_);
      }
    }
    case Family::covariate_sequential: {
      // Step one: assign the marked stratum independently. Step two: treat an
      // equal count in the other stratum, uniformly.
      const auto a_pos = mask_positions(stratum_mask_, n_);
      const auto b_pos = mask_positions(~stratum_mask_ & ((std::uint64_t{1} << n_) - 1), n_);
      std::uint64_t mask = 0;
      int l = 0;
      for (const int p : a_pos) {
        if (rng.next_below(2) == 1) {
          mask |= std::uint64_t{1} << p;
          ++l;
        }
      }
      return AssignmentPattern(mask | sample_k_subset(b_pos, l, rng), n_);
    }
    case Family::covariate_uniform: {
      // Choose the common count l with probability C(h,l)^2 / C(n,h), then
      // uniform l-subsets inside both strata.
      const int h = n_ / 2;
      const double total = static_cast<double>(binomial(n_, h));
      double u = rng.next_unit() * total;
      int l = 0;
      for (; l < h; ++l) {
        const double c = static_cast<double>(binomial(h, l));
        const double mass = c * c;
        if (u < mass) break;
        u -= mass;
      }
      const auto a_pos = mask_positions(stratum_mask_, n_);
      const auto b_pos = mask_positions(~stratum_mask_ & ((std::uint64_t{1} << n_) - 1), n_);
      return AssignmentPattern(sample_k_subset(a_pos, l, rng) | sample_k_subset(b_pos, l, rng), n_);
    }
    case Family::custom:
      break;
  }
  throw EnumerationInfeasible("scheme '" + label_ + "': no sampling routine");
}

AssignmentPattern sample_pattern(const RandomizationScheme& scheme, SplitMix64& rng) {
  return scheme.sample(rng);
}

RandomizationScheme forced_balance_scheme(int n) {
  if (n < 2 || n % 2 != 0) {
    throw InvalidArgument("forced_balance_scheme: n must be even and >= 2");
  }
  if (n > AssignmentPattern::kMaxUnits) {
    throw InvalidArgument("forced_balance_scheme: n exceeds 63 units");
  }
  RandomizationScheme s;
  s.n_ = n;
  s.label_ = "forced-balance";
  s.family_ = RandomizationScheme::Family::forced_balance;
  s.size_ = binomial(n, n / 2);
  if (n <= RandomizationScheme::kMaxEnumerationUnits) {
    s.masks_ = k_subset_masks(n, n / 2);
  }
  return s;
}

RandomizationScheme bernoulli_scheme(int n, bool exclude_constants) {
  if (n < 1) throw InvalidArgument("bernoulli_scheme: n must be >= 1");
  if (n > 62) throw InvalidArgument("bernoulli_scheme: n exceeds 62 units");
  if (exclude_constants && n == 1) {
    throw InvalidArgument("bernoulli_scheme: excluding constants at n = 1 leaves an empty scheme");
  }
  RandomizationScheme s;
  s.n_ = n;
  s.label_ = exclude_constants ? "bernoulli-nc" : "bernoulli";
  s.family_ = exclude_constants ? RandomizationScheme::Family::bernoulli_no_constants
                                : RandomizationScheme::Family::bernoulli;
  s.size_ = (std::int64_t{1} << n) - (exclude_constants ? 2 : 0);
  if (n <= RandomizationScheme::kMaxEnumerationUnits) {
    const std::uint64_t full = (std::uint64_t{1} << n) - 1;
    s.masks_.reserve(static_cast<std::size_t>(s.size_));
    for (std::uint64_t m = exclude_constants ? 1 : 0; m <= full - (exclude_constants ? 1 : 0); ++m) {
      s.masks_.push_back(m);
    }
  }
  return s;
}

RandomizationScheme custom_scheme(const std::vector<AssignmentPattern>& patterns,
                                  const std::vector<double>& weights, std::string label) {
  if (patterns.empty()) throw InvalidArgument("custom_scheme: pattern set must be nonempty");
  const int n = patterns.front().n();
  RandomizationScheme s;
  s.n_ = n;
  s.label_ = std::move(label);
  s.family_ = RandomizationScheme::Family::custom;
  s.size_ = static_cast<std::int64_t>(patterns.size());
  s.masks_.reserve(patterns.size());
  for (const auto& p : patterns) {
    if (p.n() != n) throw InvalidArgument("custom_scheme: patterns must share one length");
    s.masks_.push_back(p.mask());
  }
  auto sorted = s.masks_;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw InvalidArgument("custom_scheme: patterns must be pairwise distinct");
  }
  if (!weights.empty()) {
    if (weights.size() != patterns.size()) {
      throw InvalidArgument("custom_scheme: one weight per pattern required");
    }
    double sum = 0;
    for (const double w : weights) {
      if (!(w > 0)) throw InvalidArgument("custom_scheme: weights must be strictly positive");
      sum += w;
    }
    if (std::abs(sum - 1.0) > kWeightSumTolerance) {
      throw InvalidArgument("custom_scheme: weights must sum to 1 within 1e-12");
    }
    s.weights_ = weights;
    s.cumulative_.resize(weights.size());
    std::partial_sum(weights.begin(), weights.end(), s.cumulative_.begin());
  }
  return s;
}

RandomizationScheme covariate_balanced_scheme(int n, const AssignmentPattern& stratum,
                                              std::string_view mode) {
  if (n < 4 || n % 4 != 0) {
    throw InvalidArgument("covariate_balanced_scheme: n must be a positive multiple of 4");
  }
  if (n > AssignmentPattern::kMaxUnits) {
    throw InvalidArgument("covariate_balanced_scheme: n exceeds 63 units");
  }
  if (stratum.n() != n || stratum.ones() != n / 2) {
    throw InvalidArgument("covariate_balanced_scheme: stratum must mark exactly n/2 of n units");
  }
  const bool sequential = mode == "sequential";
  if (!sequential && mode != "uniform") {
    throw InvalidArgument("covariate_balanced_scheme: mode must be 'uniform' or 'sequential'");
  }
  RandomizationScheme s;
  s.n_ = n;
  s.label_ = sequential ? "covariate-balanced:sequential" : "covariate-balanced";
  s.family_ = sequential ? RandomizationScheme::Family::covariate_sequential
                         : RandomizationScheme::Family::covariate_uniform;
  s.stratum_mask_ = stratum.mask();
  const int h = n / 2;
  std::int64_t total = 0;
  for (int l = 0; l <= h; ++l) {
    const std::int64_t c = binomial(h, l);
    total += c * c;
  }
  s.size_ = total;  // equals C(n, n/2) by Vandermonde; kept as the stratified sum
  if (n <= RandomizationScheme::kMaxEnumerationUnits) {
    const std::uint64_t limit = std::uint64_t{1} << n;
    const std::uint64_t b_mask = ~stratum.mask() & (limit - 1);
    s.masks_.reserve(static_cast<std::size_t>(total));
    for (std::uint64_t m = 0; m < limit; ++m) {
      if (std::popcount(m & stratum.mask()) == std::popcount(m & b_mask)) {
        s.masks_.push_back(m);
      }
    }
    if (sequential) {
      s.weights_.reserve(s.masks_.size());
      const double base = std::ldexp(1.0, -h);  // 2^(-n/2)
      for (const std::uint64_t m : s.masks_) {
        const int l = std::popcount(m & stratum.mask());
        s.weights_.push_back(base / static_cast<double>(binomial(h, l)));
      }
      s.cumulative_.resize(s.weights_.size());
      std::partial_sum(s.weights_.begin(), s.weights_.end(), s.cumulative_.begin());
    }
  }
  return s;
}

RandomizationScheme ltt_scheme(int m) {
  if (m < 1) throw InvalidArgument("ltt_scheme: m must be >= 1");
  // Same pattern set as forced balance on 2m units; relabelled for reports.
  auto s = forced_balance_scheme(2 * m);
  s.label_ = "ltt";
  return s;
}

RandomizationScheme make_scheme(std::string_view name, int n) {
  if (name == "forced-balance") return forced_balance_scheme(n);
  if (name == "bernoulli") return bernoulli_scheme(n, false);
  if (name == "bernoulli-nc") return bernoulli_scheme(n, true);
  if (name == "ltt") {
    if (n % 2 != 0) throw InvalidArgument("make_scheme: ltt requires even n");
    return ltt_scheme(n / 2);
  }
  const std::string_view cb = "covariate-balanced";
  if (name.substr(0, cb.size()) == cb) {
    std::string_view mode = "uniform";
    if (name.size() > cb.size()) {
      if (name[cb.size()] != ':') throw InvalidArgument("make_scheme: unknown scheme '" + std::string(name) + "'");
      mode = name.substr(cb.size() + 1);
    }
    if (n < 4 || n % 4 != 0) {
      throw InvalidArgument("make_scheme: covariate-balanced requires n divisible by 4");
    }
    const AssignmentPattern stratum((std::uint64_t{1} << (n / 2)) - 1, n);
    return covariate_balanced_scheme(n, stratum, mode);
  }
  throw InvalidArgument("make_scheme: unknown scheme '" + std::string(name) + "'");
}

nlohmann::json RandomizationScheme::to_json() const {
  nlohmann::json j;
  j["n"] = n_;
  j["label"] = label_;
  auto& pats = j["patterns"] = nlohmann::json::array();
  for (const std::uint64_t m : masks()) {
    pats.push_back(AssignmentPattern(m, n_).str());
  }
  auto& w = j["weights"] = nlohmann::json::array();
  for (std::int64_t i = 0; i < size_; ++i) w.push_back(weight(i));
  return j;
}

RandomizationScheme RandomizationScheme::from_json(const nlohmann::json& j) {
  std::vector<AssignmentPattern> patterns;
  for (const auto& p : j.at("patterns")) {
    patterns.push_back(AssignmentPattern::parse(p.get<std::string>()));
  }
  std::vector<double> weights;
  if (j.contains("weights") && !j.at("weights").empty()) {
    weights = j.at("weights").get<std::vector<double>>();
    // A flat vector is the uniform law; store it as such.
    const double first = weights.front();
    if (std::all_of(weights.begin(), weights.end(), [&](double w) { return w == first; })) {
      weights.clear();
    }
  }
  auto s = custom_scheme(patterns, weights, j.value("label", "custom"));
  if (j.contains("n") && j.at("n").get<int>() != s.n()) {
    throw ParseError("scheme JSON: declared n disagrees with pattern length");
  }
  return s;
}

bool operator==(const RandomizationScheme& a, const RandomizationScheme& b) {
  if (a.n_ != b.n_ || a.label_ != b.label_ || a.size_ != b.size_) return false;
  if (a.masks_ != b.masks_) return false;
  if (a.uniform() != b.uniform()) return false;
  return a.weights_ == b.weights_;
}

}  // namespace randtest
