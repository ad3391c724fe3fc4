// Strict reader for the JSON run configurations. Every key a command does
// not consume is reported as an error by finish().

#pragma once

#include <cstdint>
#include <filesystem>
#include <list>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "bellrand/common.hpp"

namespace bellrand::cli {

inline constexpr const char* kSchema = "bellrand/1";

class ConfigNode {
 public:
  ConfigNode(nlohmann::json value, std::string path);

  bool has(const std::string& key) const { return value_.contains(key); }

  template <class T>
  T get(const std::string& key) {
    if (!has(key)) throw ConfigError(where(key) + ": required key missing");
    return convert<T>(key);
  }

  template <class T>
  T get(const std::string& key, T fallback) {
    return has(key) ? convert<T>(key) : fallback;
  }

  template <class T>
  std::optional<T> optional(const std::string& key) {
    if (!has(key)) return std::nullopt;
    return convert<T>(key);
  }

  ConfigNode& child(const std::string& key);
  /// Elements of an array-valued key, each as a node.
  std::vector<ConfigNode*> children(const std::string& key);

  /// Throws on any key that was never read, here or in a child.
  void finish() const;

  const std::string& path() const noexcept { return path_; }

 private:
  template <class T>
  T convert(const std::string& key) {
    used_.insert(key);
    try {
      return value_.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
      throw ConfigError(where(key) + ": wrong type");
    }
  }
  std::string where(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  nlohmann::json value_;
  std::string path_;
  std::set<std::string> used_;
  std::list<ConfigNode> kids_;
};

struct RunConfig {
  std::string command;
  std::optional<std::uint64_t> seed;
  std::filesystem::path base_dir;  // relative paths in the config resolve here
  ConfigNode root;

  std::filesystem::path resolve(const std::string& p) const;
};

/// Parses the file, checks the schema tag and the command name.
RunConfig load_config(const std::filesystem::path& path, const std::string& expected_command);

/// Double given either as "key" or as a power of two "key_log2".
double get_epsilon(ConfigNode& node, double fallback);

}  // namespace bellrand::cli
