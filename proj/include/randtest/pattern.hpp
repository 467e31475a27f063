#pragma once

#include <bit>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace randtest {

// A treatment allocation: n binary indicators, one per experimental unit.
// Stored as a bit mask (bit i = unit i); n is capped at 63 so masks, counts
// and scheme sizes all fit in 64-bit integers.
class AssignmentPattern {
 public:
  static constexpr int kMaxUnits = 63;

  AssignmentPattern() = default;
  AssignmentPattern(std::uint64_t bits, int n_units);

  // Parses a 0/1 string, unit 1 leftmost: "0110" => units 2 and 3 treated.
  static AssignmentPattern parse(std::string_view text);

  int n() const { return n_; }
  std::uint64_t mask() const { return bits_; }
  int bit(int unit) const { return static_cast<int>((bits_ >> unit) & 1u); }
  int ones() const { return std::popcount(bits_); }

  std::string str() const;

  // 0.0/1.0 per unit; lets binary responses flow through real-valued statistics.
  std::vector<double> to_outcomes() const;

  friend bool operator==(const AssignmentPattern& a, const AssignmentPattern& b) = default;

 private:
  std::uint64_t bits_ = 0;
  int n_ = 0;
};

}  // namespace randtest
