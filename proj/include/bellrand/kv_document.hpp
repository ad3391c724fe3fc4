#pragma once

#include <concepts>
#include <cstdint>
#include <type_traits>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace bellrand {

/// Flat, ordered key-value report. Rendered either as "key = value" text
/// lines or as a JSON object with the same keys in the same order.
class KvDocument {
 public:
  using Value = std::variant<bool, std::int64_t, std::uint64_t, double, std::string>;

  KvDocument& set(std::string key, Value value);
  KvDocument& set(std::string key, const char* value) { return set(std::move(key), Value(std::string(value))); }
  KvDocument& set(std::string key, std::string value) { return set(std::move(key), Value(std::move(value))); }
  KvDocument& set(std::string key, double value) { return set(std::move(key), Value(value)); }
  template <std::integral T>
  KvDocument& set(std::string key, T value) {
    if constexpr (std::is_same_v<T, bool>)
      return set(std::move(key), Value(value));
    else if constexpr (std::is_signed_v<T>)
      return set(std::move(key), Value(static_cast<std::int64_t>(value)));
    else
      return set(std::move(key), Value(static_cast<std::uint64_t>(value)));
  }

  const Value* find(const std::string& key) const;
  double number(const std::string& key) const;
  const std::vector<std::pair<std::string, Value>>& entries() const noexcept { return entries_; }

  /// Appends every entry of `other` with `prefix` prepended to the keys.
  KvDocument& merge(const KvDocument& other, const std::string& prefix = "");

  std::string to_text() const;
  std::string to_json() const;

 private:
  std::vector<std::pair<std::string, Value>> entries_;
};

}  // namespace bellrand
