#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <minimax_cubic/types.hpp>

namespace minimax_cubic::cli {

/// Shortest-safe round-trip formatting: 17 significant digits.
std::string format_double(double v);

/// JSON string literal with escaping.
std::string quote(const std::string& s);

/// Insertion-ordered JSON object emitted on one line. Non-finite numbers
/// become null.
class JsonObject {
 public:
  JsonObject& add(const std::string& key, double v);
  JsonObject& add(const std::string& key, std::int64_t v);
  JsonObject& add(const std::string& key, int v) { return add(key, static_cast<std::int64_t>(v)); }
  JsonObject& add(const std::string& key, std::uint64_t v);
  JsonObject& add(const std::string& key, bool v);
  JsonObject& add(const std::string& key, const std::string& v);
  JsonObject& add(const std::string& key, const char* v) { return add(key, std::string(v)); }
  JsonObject& add(const std::string& key, const Vector& v);
  JsonObject& add(const std::string& key, const std::optional<double>& v);
  JsonObject& add(const std::string& key, const JsonObject& v);
  JsonObject& add_null(const std::string& key);

  std::string str() const;

 private:
  std::vector<std::pair<std::string, std::string>> fields_;
};

}  // namespace minimax_cubic::cli
