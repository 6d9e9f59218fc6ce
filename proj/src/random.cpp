#include "rankcal/random.hpp"

#include <cmath>
#include <limits>

namespace rankcal {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

namespace {

std::uint64_t mix(std::uint64_t seed, std::uint64_t key) noexcept {
  return splitmix64(splitmix64(seed) ^ splitmix64(key ^ 0x6a09e667f3bcc909ULL));
}

}  // namespace

RandomSource::RandomSource(std::uint64_t seed, std::uint64_t stream_key)
    : seed_(seed), key_(stream_key), engine_(mix(seed, stream_key)) {}

RandomSource RandomSource::substream(std::uint64_t key) const {
  return RandomSource(seed_, mix(key_, key));
}

RandomSource RandomSource::derived(std::uint64_t seed, std::uint64_t key, std::uint64_t subkey) {
  return RandomSource(seed, mix(key, subkey));
}

double RandomSource::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double RandomSource::normal() {
  if (has_cached_) {
    has_cached_ = false;
    return cached_normal_;
  }
  double u = 0.0, v = 0.0, s = 0.0;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double f = std::sqrt(-2.0 * std::log(s) / s);
  cached_normal_ = v * f;
  has_cached_ = true;
  return u * f;
}

std::uint64_t RandomSource::uniform_index(std::uint64_t n) {
  // Reject the low residue band so every value is equally likely.
  const std::uint64_t threshold = (0 - n) % n;
  for (;;) {
    const std::uint64_t x = engine_();
    if (x >= threshold) return x % n;
  }
}

}  // namespace rankcal
