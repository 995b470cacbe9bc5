#pragma once

#include <cstdint>
#include <initializer_list>
#include <limits>

namespace congest {

/// Purposes for which independent random streams are derived from a root seed.
/// Adding a purpose never shifts the values drawn for another one.
enum class StreamPurpose : std::uint64_t {
  kGraphGeneration = 1,
  kLevelSampling = 2,
  kBetweenSampling = 3,
  kSchedulerDelay = 4,
  kTrialSeed = 5,
  kPhase = 6,
};

inline constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Hashes a root seed and a tuple of tags into a stream key.
inline std::uint64_t derive_key(std::uint64_t seed, StreamPurpose purpose,
                                std::initializer_list<std::uint64_t> tags = {}) noexcept {
  std::uint64_t k = splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(purpose)));
  for (std::uint64_t t : tags) k = splitmix64(k ^ splitmix64(t + 0x632be59bd9b4e019ULL));
  return k;
}

/// Counter-based generator: output i is a pure function of (key, i). Satisfies
/// UniformRandomBitGenerator so it plugs into the <random> distributions.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit constexpr CounterRng(std::uint64_t key) noexcept : key_(key) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  constexpr result_type operator()() noexcept { return splitmix64(key_ ^ splitmix64(counter_++)); }

  /// Uniform double in [0, 1).
  double uniform01() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  bool coin() noexcept { return ((*this)() >> 63) != 0; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace congest
