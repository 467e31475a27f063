#pragma once

#include <cstdint>

namespace randtest {

// Exact binomial coefficient in signed 64-bit arithmetic.
// Throws InvalidArgument on negative arguments or overflow.
std::int64_t binomial(int n, int k);

}  // namespace randtest
