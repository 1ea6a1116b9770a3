#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace reid {

// SplitMix64: a 64-bit counter-based generator (Steele, Lea & Flood 2014).
// The state advances by a fixed odd constant and each output is a bijective
// mix of the counter, so a stream is fully determined by its starting
// counter. Independent streams are derived by hashing (seed, stream tags)
// into a fresh starting counter, which keeps parallel generation
// deterministic regardless of scheduling.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  // Derived stream for (seed, tag, a, b), e.g. tag="corpus", a=program
  // index, b=window index.
  static Rng stream(std::uint64_t seed, std::string_view tag, std::uint64_t a = 0,
                    std::uint64_t b = 0);

  std::uint64_t next_u64();

  // Uniform in [0, 1) with 53 random bits.
  double uniform();

  // Uniform in [lo, hi).
  double uniform(double lo, double hi);

  // Uniform integer in [0, n), n >= 1. Rejection sampling, no modulo bias.
  std::uint64_t bounded(std::uint64_t n);

  // Knuth's product method; fine for the small rates used here.
  int poisson(double rate);

  // Index sampled from explicit weights (need not be normalized).
  std::size_t weighted(const std::vector<double>& weights);

  template <typename T>
  void shuffle(std::vector<T>& xs) {
    for (std::size_t i = xs.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(bounded(i));
      std::swap(xs[i - 1], xs[j]);
    }
  }

 private:
  std::uint64_t state_;
};

}  // namespace reid
