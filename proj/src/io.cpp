#include "bellrand/io.hpp"

#include <fstream>
#include <iterator>
#include <system_error>

#include <unistd.h>

#include "bellrand/common.hpp"

namespace bellrand::io {

namespace fs = std::filesystem;

std::vector<std::uint8_t> read_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<std::uint8_t> data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("read failed: " + path.string());
  return data;
}

std::string read_text(const fs::path& path) {
  const auto bytes = read_bytes(path);
  return std::string(bytes.begin(), bytes.end());
}

BitString read_bits(const fs::path& path) { return from_bytes(read_bytes(path)); }

AtomicOutputs::~AtomicOutputs() {
  std::error_code ec;
  for (auto& [tmp, target] : staged_) fs::remove(tmp, ec);
}

void AtomicOutputs::add(fs::path target, std::vector<std::uint8_t> content) {
  pending_.emplace_back(std::move(target), std::move(content));
}

void AtomicOutputs::add(fs::path target, const std::string& content) {
  add(std::move(target), std::vector<std::uint8_t>(content.begin(), content.end()));
}

void AtomicOutputs::add_bits(fs::path target, const BitString& bits) {
  add(std::move(target), to_bytes(bits));
}

void AtomicOutputs::commit() {
  const std::string suffix = ".tmp." + std::to_string(::getpid());
  for (auto& [target, content] : pending_) {
    std::error_code ec;
    if (target.has_parent_path()) fs::create_directories(target.parent_path(), ec);
    fs::path tmp = target;
    tmp += suffix;
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      if (!out) throw IoError("cannot write " + tmp.string());
      staged_.emplace_back(tmp, target);
      out.write(reinterpret_cast<const char*>(content.data()), static_cast<std::streamsize>(content.size()));
      out.flush();
      if (!out) throw IoError("write failed: " + tmp.string());
    }
  }
  for (auto& [tmp, target] : staged_) {
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) throw IoError("cannot publish " + target.string() + ": " + ec.message());
  }
  staged_.clear();
  pending_.clear();
}

}  // namespace bellrand::io
