#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "bellrand/bitstring.hpp"

namespace bellrand::io {

std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path);
std::string read_text(const std::filesystem::path& path);

BitString read_bits(const std::filesystem::path& path);

/// Collects output files and publishes them together: everything is first
/// written to temporaries next to the targets, then renamed. Nothing is left
/// behind when staging fails or the transaction is dropped uncommitted.
class AtomicOutputs {
 public:
  AtomicOutputs() = default;
  AtomicOutputs(const AtomicOutputs&) = delete;
  AtomicOutputs& operator=(const AtomicOutputs&) = delete;
  ~AtomicOutputs();

  void add(std::filesystem::path target, std::vector<std::uint8_t> content);
  void add(std::filesystem::path target, const std::string& content);
  void add_bits(std::filesystem::path target, const BitString& bits);

  void commit();

 private:
  std::vector<std::pair<std::filesystem::path, std::vector<std::uint8_t>>> pending_;
  std::vector<std::pair<std::filesystem::path, std::filesystem::path>> staged_;
};

}  // namespace bellrand::io
