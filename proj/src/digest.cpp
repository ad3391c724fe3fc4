#include "bellrand/digest.hpp"

#include <openssl/sha.h>

namespace bellrand {

std::string sha256_hex(std::span<const std::uint8_t> data) {
  unsigned char md[SHA256_DIGEST_LENGTH];
  SHA256(data.data(), data.size(), md);
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out(2 * SHA256_DIGEST_LENGTH, '0');
  for (int i = 0; i < SHA256_DIGEST_LENGTH; ++i) {
    out[static_cast<std::size_t>(2 * i)] = kHex[md[i] >> 4];
    out[static_cast<std::size_t>(2 * i + 1)] = kHex[md[i] & 15];
  }
  return out;
}

std::string sha256_hex(const std::string& data) {
  return sha256_hex(std::span(reinterpret_cast<const std::uint8_t*>(data.data()), data.size()));
}

}  // namespace bellrand
