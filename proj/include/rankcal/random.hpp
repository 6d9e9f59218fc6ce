#pragma once

#include <cstdint>
#include <random>

namespace rankcal {

/// Well-known substream purposes. Each case derives independent streams for
/// sampling and for tie resolution so that one never perturbs the other.
namespace stream {
inline constexpr std::uint64_t sampling = 0x53414d50ULL;
inline constexpr std::uint64_t ties = 0x54494553ULL;
inline constexpr std::uint64_t dressing = 0x44524553ULL;
}  // namespace stream

/// Reproducible random stream identified by (seed, stream_key).
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the C++
/// standard. The engine seed is a SplitMix64 mix of seed and key, so nearby
/// keys give unrelated streams. Uniform reals use the top 53 bits; normals
/// use the Marsaglia polar method (the second variate of each accepted pair
/// is cached). Integer draws use rejection sampling. None of this depends on
/// the standard library's distribution classes, whose algorithms are
/// implementation-defined.
class RandomSource {
 public:
  RandomSource(std::uint64_t seed, std::uint64_t stream_key);

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_key() const noexcept { return key_; }

  /// Independent child stream; deterministic in (seed, stream_key, key).
  RandomSource substream(std::uint64_t key) const;
  /// RandomSource(seed, key).substream(subkey) without seeding the parent.
  static RandomSource derived(std::uint64_t seed, std::uint64_t key, std::uint64_t subkey);

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform on [0, 1).
  double uniform();
  double normal();
  /// Uniform on {0, ..., n - 1}; n must be positive.
  std::uint64_t uniform_index(std::uint64_t n);

 private:
  std::uint64_t seed_;
  std::uint64_t key_;
  std::mt19937_64 engine_;
  double cached_normal_ = 0.0;
  bool has_cached_ = false;
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

}  // namespace rankcal
