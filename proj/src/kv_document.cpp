#include "bellrand/kv_document.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include <json.hpp>

#include "bellrand/common.hpp"

namespace bellrand {

namespace {

std::string render(const KvDocument::Value& v) {
  return std::visit(
      [](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, bool>) {
          return x ? "true" : "false";
        } else if constexpr (std::is_same_v<T, std::string>) {
          return x;
        } else if constexpr (std::is_same_v<T, double>) {
          char buf[64];
          auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), x);
          return std::string(buf, p);
        } else {
          return std::to_string(x);
        }
      },
      v);
}

}  // namespace

KvDocument& KvDocument::set(std::string key, Value value) {
  for (auto& [k, v] : entries_)
    if (k == key) {
      v = std::move(value);
      return *this;
    }
  entries_.emplace_back(std::move(key), std::move(value));
  return *this;
}

const KvDocument::Value* KvDocument::find(const std::string& key) const {
  for (const auto& [k, v] : entries_)
    if (k == key) return &v;
  return nullptr;
}

double KvDocument::number(const std::string& key) const {
  const Value* v = find(key);
  if (!v) throw InvalidArgument("KvDocument: missing key " + key);
  return std::visit(
      [&](const auto& x) -> double {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, std::string>) {
          throw InvalidArgument("KvDocument: key " + key + " is not numeric");
        } else {
          return static_cast<double>(x);
        }
      },
      *v);
}

KvDocument& KvDocument::merge(const KvDocument& other, const std::string& prefix) {
  for (const auto& [k, v] : other.entries_) set(prefix + k, v);
  return *this;
}

std::string KvDocument::to_text() const {
  std::ostringstream os;
  for (const auto& [k, v] : entries_) os << k << " = " << render(v) << '\n';
  return os.str();
}

std::string KvDocument::to_json() const {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (const auto& [k, v] : entries_) {
    std::visit(
        [&](const auto& x) {
          using T = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<T, double>) {
            if (std::isfinite(x))
              j[k] = x;
            else
              j[k] = render(v);
          } else {
            j[k] = x;
          }
        },
        v);
  }
  return j.dump(2) + "\n";
}

}  // namespace bellrand
