#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bellrand/rng.hpp"

namespace bellrand {

/// Packed bit string. Internally bit i lives in word i / 64 at position
/// i % 64; the tail of the last word is always zero.
class BitString {
 public:
  BitString() = default;
  explicit BitString(std::size_t n) : size_(n), words_((n + 63) / 64, 0) {}

  /// "0110" -> bits 0,1,1,0 (character k is bit k).
  static BitString from_string(std::string_view s);
  static BitString from_bits(std::span<const std::uint8_t> bits);
  static BitString from_words(std::vector<std::uint64_t> words, std::size_t n);
  /// Uniform bits from the counter RNG; word w uses counter `offset + w`.
  static BitString random(std::size_t n, std::uint64_t seed, Stream stream = Stream::seed_bits,
                          std::uint64_t offset = 0);

  std::size_t size() const noexcept { return size_; }
  bool empty() const noexcept { return size_ == 0; }

  bool operator[](std::size_t i) const noexcept { return (words_[i >> 6] >> (i & 63)) & 1U; }
  void set(std::size_t i, bool v) noexcept {
    const std::uint64_t m = std::uint64_t{1} << (i & 63);
    words_[i >> 6] = v ? (words_[i >> 6] | m) : (words_[i >> 6] & ~m);
  }
  void push_back(bool v);
  void append(const BitString& other);

  std::span<const std::uint64_t> words() const noexcept { return words_; }

  BitString slice(std::size_t begin, std::size_t length) const;
  std::size_t popcount() const noexcept;
  std::string to_string() const;

  BitString& operator^=(const BitString& other);
  friend BitString operator^(BitString a, const BitString& b) { return a ^= b; }
  friend bool operator==(const BitString&, const BitString&) = default;

 private:
  void clear_tail() noexcept;

  std::size_t size_ = 0;
  std::vector<std::uint64_t> words_;
};

/// Packed byte layout shared by every bit file: most significant bit first
/// within each byte, final byte zero-padded.
std::vector<std::uint8_t> to_bytes(const BitString& bits);
BitString from_bytes(std::span<const std::uint8_t> bytes, std::size_t bit_count);
inline BitString from_bytes(std::span<const std::uint8_t> bytes) {
  return from_bytes(bytes, bytes.size() * 8);
}

}  // namespace bellrand
