#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace randtest {

// One data transformation: a coordinate permutation x -> (x_{pi(1)},...) or a
// sign-flip x -> (s_1 x_1, ...). Permutations are capped at 16 positions so
// every element packs into a 64-bit canonical key; set membership during
// group checking is exact integer comparison, never tolerance-based.
class Transformation {
 public:
  enum class Kind { permutation, sign_flip };

  // image[i] is the source index of output position i: out[i] = x[image[i]].
  static Transformation permutation(std::vector<std::uint8_t> image);
  static Transformation sign_flip(std::uint64_t negate_mask, int n);
  static Transformation identity(Kind kind, int n);

  Kind kind() const { return kind_; }
  int n() const { return n_; }
  bool is_identity() const;

  const std::vector<std::uint8_t>& image() const { return image_; }
  std::uint64_t negate_mask() const { return mask_; }

  std::vector<double> apply(std::span<const double> x) const;
  void apply_into(std::span<const double> x, std::span<double> out) const;

  // (*this) o inner: inner acts first.
  Transformation compose(const Transformation& inner) const;
  Transformation inverse() const;

  // Canonical 64-bit encoding, unique within one kind.
  std::uint64_t key() const;

  std::string str() const;
  nlohmann::json to_json() const;
  static Transformation from_json(const nlohmann::json& j);

  friend bool operator==(const Transformation& a, const Transformation& b) = default;

 private:
  Transformation() = default;

  Kind kind_ = Kind::sign_flip;
  int n_ = 0;
  std::vector<std::uint8_t> image_;  // permutation only
  std::uint64_t mask_ = 0;           // sign_flip only
};

// A finite set of transformations of one kind. `validated` marks sets that
// are groups by construction (built-in groups); arbitrary element sets start
// unvalidated and must pass check_group before the safe invariance test.
struct TransformationGroup {
  int n = 0;
  std::string label;
  std::vector<Transformation> elements;
  bool validated = false;
};

// Outcome of the group-axiom check. Witnesses are concrete counterexamples:
// re-composing a closure witness pair yields an element outside the set.
struct GroupCheckReport {
  bool has_identity = false;
  bool closed = false;
  bool has_inverses = false;
  std::vector<std::pair<Transformation, Transformation>> closure_witnesses;  // up to 3
  std::vector<Transformation> inverse_witnesses;                             // up to 3

  bool is_group() const { return has_identity && closed && has_inverses; }
  std::string describe_failure() const;  // names the failed axioms and witnesses
  nlohmann::json to_json() const;
  static GroupCheckReport from_json(const nlohmann::json& j);

  friend bool operator==(const GroupCheckReport&, const GroupCheckReport&) = default;
};

// O(|G|^2) composition scan with exact hash-set membership.
// Throws InvalidArgument on an empty set, mixed kinds, or duplicates.
GroupCheckReport check_group(const TransformationGroup& group);

// All n! coordinate permutations; n <= 8.
TransformationGroup symmetric_group(int n);

// All 2^n sign-flip maps; n <= 20.
TransformationGroup sign_flip_group(int n);

// The cyclic group {g^0, g^1, ...} generated by one element.
TransformationGroup cyclic_group(const Transformation& generator);

// All permutations moving exactly half of the case positions (the first
// n_cases coordinates) into control positions and vice versa. The canonical
// non-group: no identity, not closed. Returned unvalidated.
TransformationGroup balanced_permutations(int n_cases, int n_controls);

}  // namespace randtest
