#pragma once

#include <cstdint>
#include <initializer_list>
#include <limits>

namespace weibayes {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Counter-based random stream: output i is mix64(key + (i + 1) * golden).
///
/// A stream is fully determined by its key, so substreams for independent
/// replications can be created in any order (or on any thread) and always
/// produce the same values. Satisfies UniformRandomBitGenerator.
class CounterStream {
 public:
  using result_type = std::uint64_t;

  explicit constexpr CounterStream(std::uint64_t key) noexcept : state_(key) {}

  /// Stream keyed by a seed and a path of indices, e.g. (seed, {n, r, rep}).
  static constexpr CounterStream derive(std::uint64_t seed,
                                        std::initializer_list<std::uint64_t> path) noexcept {
    std::uint64_t key = mix64(seed ^ 0x6a09e667f3bcc909ULL);
    for (std::uint64_t id : path) {
      key = mix64(key + kGolden * (id + 1));
    }
    return CounterStream(key);
  }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  constexpr result_type operator()() noexcept {
    state_ += kGolden;
    return mix64(state_);
  }

  /// Uniform draw on the open interval (0, 1) with 53 random bits.
  constexpr double uniform01() noexcept {
    return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
  }

 private:
  static constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;
  std::uint64_t state_;
};

}  // namespace weibayes
