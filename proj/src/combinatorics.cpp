#include "randtest/combinatorics.hpp"

#include <limits>

#include "randtest/errors.hpp"

namespace randtest {

std::int64_t binomial(int n, int k) {
  if (n < 0 || k < 0) {
    throw InvalidArgument("binomial: arguments must be nonnegative");
  }
  if (k > n) return 0;
  if (k > n - k) k = n - k;
  __int128 acc = 1;
  for (int i = 1; i <= k; ++i) {
    acc = acc * (n - k + i) / i;  // product of i consecutive ints is divisible by i!
    if (acc > std::numeric_limits<std::int64_t>::max()) {
      throw InvalidArgument("binomial: result exceeds 64-bit range");
    }
  }
  return static_cast<std::int64_t>(acc);
}

}  // namespace randtest
