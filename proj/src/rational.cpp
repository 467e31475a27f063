#include "randtest/rational.hpp"

#include <numeric>

#include "randtest/errors.hpp"

namespace randtest {

Rational::Rational(std::int64_t num, std::int64_t den) : num_(num), den_(den) {
  if (den_ <= 0) throw InvalidArgument("Rational: denominator must be positive");
  if (num_ < 0) throw InvalidArgument("Rational: numerator must be nonnegative");
  const std::int64_t g = std::gcd(num_, den_);
  if (g > 1) {
    num_ /= g;
    den_ /= g;
  }
}

std::string Rational::str() const {
  return std::to_string(num_) + "/" + std::to_string(den_);
}

bool operator<(const Rational& a, const Rational& b) {
  return static_cast<__int128>(a.num_) * b.den_ < static_cast<__int128>(b.num_) * a.den_;
}

}  // namespace randtest
