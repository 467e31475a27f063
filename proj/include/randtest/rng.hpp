#pragma once

#include <cstdint>

namespace randtest {

// SplitMix64: a counter-based 64-bit generator (Steele, Lea & Flood 2014).
// The state is a plain counter pushed through a mixing finalizer; streams
// derived from distinct keys are unrelated and reproducible regardless of
// execution order, which is what parallel simulation replications need.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~std::uint64_t{0}; }

  result_type operator()() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  // Uniform on [0,1), 53-bit resolution.
  double next_unit() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, bound); rejection sampling, no modulo bias.
  std::uint64_t next_below(std::uint64_t bound);

  // Standard normal via Box-Muller. No cached spare: every draw consumes two
  // words, keeping replication substreams free of hidden state.
  double next_normal();

 private:
  std::uint64_t state_;
};

// Stream keyed by (seed, a, b, c). Distinct key paths give unrelated streams.
SplitMix64 substream(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0,
                     std::uint64_t c = 0);

}  // namespace randtest
