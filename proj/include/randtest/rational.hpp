#pragma once

#include <cstdint>
#include <string>

namespace randtest {

// Exact nonnegative rational. p-values and attainable levels are fractions
// such as 17/70; keeping them exact removes every floating-point question at
// the decision boundary.
class Rational {
 public:
  Rational() = default;
  Rational(std::int64_t num, std::int64_t den);  // den > 0, num >= 0; reduces

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }
  double value() const { return static_cast<double>(num_) / static_cast<double>(den_); }
  std::string str() const;  // "17/70"

  friend bool operator==(const Rational& a, const Rational& b) = default;
  friend bool operator<(const Rational& a, const Rational& b);
  friend bool operator<=(const Rational& a, const Rational& b) { return a == b || a < b; }

 private:
  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

}  // namespace randtest
