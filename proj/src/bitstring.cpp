#include "bellrand/bitstring.hpp"

#include <bit>

#include "bellrand/common.hpp"

namespace bellrand {

BitString BitString::from_string(std::string_view s) {
  BitString b(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '0' && s[i] != '1') throw InvalidArgument("BitString: expected only '0'/'1'");
    b.set(i, s[i] == '1');
  }
  return b;
}

BitString BitString::from_bits(std::span<const std::uint8_t> bits) {
  BitString b(bits.size());
  for (std::size_t i = 0; i < bits.size(); ++i) b.set(i, bits[i] != 0);
  return b;
}

BitString BitString::from_words(std::vector<std::uint64_t> words, std::size_t n) {
  if (words.size() != (n + 63) / 64) throw DimensionError("BitString::from_words: word count mismatch");
  BitString b;
  b.size_ = n;
  b.words_ = std::move(words);
  b.clear_tail();
  return b;
}

BitString BitString::random(std::size_t n, std::uint64_t seed, Stream stream, std::uint64_t offset) {
  BitString b(n);
  for (std::size_t w = 0; w < b.words_.size(); ++w) b.words_[w] = CounterRng(seed, offset + w, stream)();
  b.clear_tail();
  return b;
}

void BitString::push_back(bool v) {
  if ((size_ & 63) == 0) words_.push_back(0);
  ++size_;
  set(size_ - 1, v);
}

void BitString::append(const BitString& other) {
  if ((size_ & 63) == 0) {
    words_.insert(words_.end(), other.words_.begin(), other.words_.end());
    size_ += other.size_;
    return;
  }
  for (std::size_t i = 0; i < other.size_; ++i) push_back(other[i]);
}

BitString BitString::slice(std::size_t begin, std::size_t length) const {
  if (begin > size_ || length > size_ - begin) throw InvalidArgument("BitString::slice: out of range");
  BitString out(length);
  const std::size_t shift = begin & 63;
  const std::size_t first = begin >> 6;
  for (std::size_t w = 0; w < out.words_.size(); ++w) {
    std::uint64_t v = words_[first + w] >> shift;
    if (shift != 0 && first + w + 1 < words_.size()) v |= words_[first + w + 1] << (64 - shift);
    out.words_[w] = v;
  }
  out.clear_tail();
  return out;
}

std::size_t BitString::popcount() const noexcept {
  std::size_t c = 0;
  for (auto w : words_) c += static_cast<std::size_t>(std::popcount(w));
  return c;
}

std::string BitString::to_string() const {
  std::string s(size_, '0');
  for (std::size_t i = 0; i < size_; ++i)
    if ((*this)[i]) s[i] = '1';
  return s;
}

BitString& BitString::operator^=(const BitString& other) {
  if (other.size_ != size_) throw DimensionError("BitString xor: length mismatch");
  for (std::size_t w = 0; w < words_.size(); ++w) words_[w] ^= other.words_[w];
  return *this;
}

void BitString::clear_tail() noexcept {
  if ((size_ & 63) != 0 && !words_.empty()) words_.back() &= (std::uint64_t{1} << (size_ & 63)) - 1;
}

std::vector<std::uint8_t> to_bytes(const BitString& bits) {
  std::vector<std::uint8_t> out((bits.size() + 7) / 8, 0);
  for (std::size_t i = 0; i < bits.size(); ++i)
    if (bits[i]) out[i >> 3] |= static_cast<std::uint8_t>(0x80U >> (i & 7));
  return out;
}

BitString from_bytes(std::span<const std::uint8_t> bytes, std::size_t bit_count) {
  if (bit_count > bytes.size() * 8) throw InvalidArgument("from_bytes: not enough bytes");
  BitString b(bit_count);
  for (std::size_t i = 0; i < bit_count; ++i) b.set(i, (bytes[i >> 3] >> (7 - (i & 7))) & 1U);
  return b;
}

}  // namespace bellrand
