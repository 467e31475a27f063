#include "randtest/rng.hpp"

#include <cmath>
#include <numbers>

#include "randtest/errors.hpp"

namespace randtest {

namespace {

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace

std::uint64_t SplitMix64::next_below(std::uint64_t bound) {
  if (bound == 0) throw InvalidArgument("next_below: bound must be positive");
  const std::uint64_t threshold = (0 - bound) % bound;
  for (;;) {
    const std::uint64_t r = (*this)();
    if (r >= threshold) return r % bound;
  }
}

double SplitMix64::next_normal() {
  // u1 in (0,1] so the log is finite.
  const double u1 = 1.0 - next_unit();
  const double u2 = next_unit();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

SplitMix64 substream(std::uint64_t seed, std::uint64_t a, std::uint64_t b,
                     std::uint64_t c) {
  std::uint64_t s = mix64(seed + 0x9E3779B97F4A7C15ull);
  s = mix64(s ^ (a + 0xBF58476D1CE4E5B9ull));
  s = mix64(s ^ (b + 0x94D049BB133111EBull));
  s = mix64(s ^ (c + 0xD6E8FEB86659FD93ull));
  return SplitMix64(s);
}

}  // namespace randtest
