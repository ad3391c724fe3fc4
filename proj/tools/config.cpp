#include "config.hpp"

#include <cmath>
#include <fstream>

namespace bellrand::cli {

ConfigNode::ConfigNode(nlohmann::json value, std::string path) : value_(std::move(value)), path_(std::move(path)) {
  if (!value_.is_object()) throw ConfigError((path_.empty() ? "config" : path_) + ": expected an object");
}

ConfigNode& ConfigNode::child(const std::string& key) {
  if (!has(key)) throw ConfigError(where(key) + ": required section missing");
  used_.insert(key);
  return kids_.emplace_back(value_.at(key), where(key));
}

std::vector<ConfigNode*> ConfigNode::children(const std::string& key) {
  if (!has(key)) throw ConfigError(where(key) + ": required list missing");
  const auto& arr = value_.at(key);
  if (!arr.is_array()) throw ConfigError(where(key) + ": expected a list");
  used_.insert(key);
  std::vector<ConfigNode*> out;
  for (std::size_t i = 0; i < arr.size(); ++i)
    out.push_back(&kids_.emplace_back(arr[i], where(key) + "[" + std::to_string(i) + "]"));
  return out;
}

void ConfigNode::finish() const {
  for (const auto& [key, _] : value_.items())
    if (!used_.count(key)) throw ConfigError(where(key) + ": unknown key");
  for (const auto& k : kids_) k.finish();
}

std::filesystem::path RunConfig::resolve(const std::string& p) const {
  const std::filesystem::path path(p);
  return path.is_absolute() ? path : base_dir / path;
}

RunConfig load_config(const std::filesystem::path& path, const std::string& expected_command) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config " + path.string() + ": " + e.what());
  }
  RunConfig cfg{expected_command, std::nullopt, path.parent_path(), ConfigNode(std::move(j), "")};
  const auto schema = cfg.root.get<std::string>("schema");
  if (schema != kSchema) throw ConfigError("schema: expected '" + std::string(kSchema) + "', got '" + schema + "'");
  const auto command = cfg.root.get<std::string>("command");
  if (command != expected_command)
    throw ConfigError("command: config is for '" + command + "', not '" + expected_command + "'");
  cfg.seed = cfg.root.optional<std::uint64_t>("seed");
  return cfg;
}

double get_epsilon(ConfigNode& node, double fallback) {
  if (node.has("epsilon") && node.has("epsilon_log2"))
    throw ConfigError(node.path() + ": give either epsilon or epsilon_log2");
  if (node.has("epsilon_log2")) return std::exp2(node.get<double>("epsilon_log2"));
  return node.get<double>("epsilon", fallback);
}

}  // namespace bellrand::cli
