#pragma once

#include <cstdint>

namespace symon {

// Counter-based random stream. Output k of the stream keyed by
// (seed, index, lane) is a pure hash of those values and k, so any draw can be
// reproduced without replaying earlier draws and results do not depend on how
// sample indices are split across threads.
class CounterStream {
 public:
  CounterStream(std::uint64_t seed, std::uint64_t index, std::uint64_t lane = 0) noexcept
      : key_(mix(mix(mix(seed) ^ (index + 0x9e3779b97f4a7c15ULL)) ^
                 (lane * 0xd1b54a32d192ed03ULL + 0x632be59bd9b4e019ULL))) {}

  std::uint64_t next() noexcept { return mix(key_ + 0x9e3779b97f4a7c15ULL * ++counter_); }

  // Uniform in [0, bound) by rejection, bound > 0.
  std::uint64_t below(std::uint64_t bound) noexcept {
    const std::uint64_t limit = (~std::uint64_t{0}) - (~std::uint64_t{0}) % bound;
    std::uint64_t x = next();
    while (x >= limit) x = next();
    return x % bound;
  }

  std::uint64_t key() const noexcept { return key_; }

  // splitmix64 finalizer
  static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30U)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27U)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31U);
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace symon
