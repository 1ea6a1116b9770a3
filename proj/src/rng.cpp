#include "reid/rng.hpp"

#include <cmath>

#include "reid/error.hpp"

namespace reid {

namespace {

constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t fnv1a64_bytes(std::uint64_t h, const void* data, std::size_t len) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

Rng Rng::stream(std::uint64_t seed, std::string_view tag, std::uint64_t a, std::uint64_t b) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  h = fnv1a64_bytes(h, &seed, sizeof(seed));
  h = fnv1a64_bytes(h, tag.data(), tag.size());
  h = fnv1a64_bytes(h, &a, sizeof(a));
  h = fnv1a64_bytes(h, &b, sizeof(b));
  return Rng(mix64(h));
}

std::uint64_t Rng::next_u64() {
  state_ += kGamma;
  return mix64(state_);
}

double Rng::uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

std::uint64_t Rng::bounded(std::uint64_t n) {
  if (n == 0) throw Error(Errc::shape_mismatch, "bounded(0)");
  const std::uint64_t threshold = (0 - n) % n;
  for (;;) {
    const std::uint64_t r = next_u64();
    if (r >= threshold) return r % n;
  }
}

int Rng::poisson(double rate) {
  if (rate < 0.0) throw Error(Errc::bad_profile, "negative event rate");
  if (rate == 0.0) return 0;
  const double limit = std::exp(-rate);
  int k = 0;
  double p = 1.0;
  do {
    ++k;
    p *= uniform();
  } while (p > limit);
  return k - 1;
}

std::size_t Rng::weighted(const std::vector<double>& weights) {
  double total = 0.0;
  for (double w : weights) total += w;
  if (weights.empty() || total <= 0.0) throw Error(Errc::bad_profile, "weights must sum > 0");
  double u = uniform() * total;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    u -= weights[i];
    if (u < 0.0) return i;
  }
  return weights.size() - 1;
}

}  // namespace reid
