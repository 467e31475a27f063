#include "randtest/pattern.hpp"

#include "randtest/errors.hpp"

namespace randtest {

AssignmentPattern::AssignmentPattern(std::uint64_t bits, int n_units)
    : bits_(bits), n_(n_units) {
  if (n_units < 1 || n_units > kMaxUnits) {
    throw InvalidArgument("AssignmentPattern: n must be in [1, 63]");
  }
  if (n_units < 64 && (bits >> n_units) != 0) {
    throw InvalidArgument("AssignmentPattern: bits set beyond unit n");
  }
}

AssignmentPattern AssignmentPattern::parse(std::string_view text) {
  if (text.empty() || text.size() > kMaxUnits) {
    throw InvalidArgument("AssignmentPattern: pattern string must have 1..63 characters");
  }
  std::uint64_t bits = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '1') {
      bits |= std::uint64_t{1} << i;
    } else if (text[i] != '0') {
      throw InvalidArgument("AssignmentPattern: pattern string must be 0/1 only");
    }
  }
  return AssignmentPattern(bits, static_cast<int>(text.size()));
}

std::string AssignmentPattern::str() const {
  std::string out(static_cast<std::size_t>(n_), '0');
  for (int i = 0; i < n_; ++i) {
    if (bit(i)) out[static_cast<std::size_t>(i)] = '1';
  }
  return out;
}

std::vector<double> AssignmentPattern::to_outcomes() const {
  std::vector<double> out(static_cast<std::size_t>(n_));
  for (int i = 0; i < n_; ++i) out[static_cast<std::size_t>(i)] = bit(i);
  return out;
}

}  // namespace randtest
