#pragma once

#include <cstdint>
#include <span>
#include <string>

namespace bellrand {

/// Lowercase hex SHA-256.
std::string sha256_hex(std::span<const std::uint8_t> data);
std::string sha256_hex(const std::string& data);

}  // namespace bellrand
