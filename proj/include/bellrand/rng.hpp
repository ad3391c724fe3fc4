#pragma once

#include <cstdint>
#include <limits>

namespace bellrand {

// Finalizer from splitmix64; a bijection on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Independent RNG streams drawn from the same user seed.
enum class Stream : std::uint64_t {
  settings = 1,
  outcomes = 2,
  device = 3,
  source = 4,
  seed_bits = 5,
  pulses = 6,
  extractor_seed = 7,
  trial = 8,
};

/// Counter-based generator: the sequence is a pure function of
/// (seed, stream, counter), so any round can be regenerated in isolation
/// and results do not depend on how work is split across threads.
/// Satisfies UniformRandomBitGenerator.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  CounterRng(std::uint64_t seed, std::uint64_t counter,
             Stream stream = Stream::outcomes) noexcept
      : state_(mix64(seed ^ mix64(counter * 0x9e3779b97f4a7c15ULL +
                                  static_cast<std::uint64_t>(stream)))) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix64(state_);
  }

  // Uniform on [0, 1) with 53 random mantissa bits.
  double uniform() noexcept {
    return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
  }

 private:
  std::uint64_t state_;
};

}  // namespace bellrand
