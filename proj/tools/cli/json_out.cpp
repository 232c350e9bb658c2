#include "json_out.hpp"

#include <cmath>
#include <cstdio>

namespace minimax_cubic::cli {

std::string format_double(double v) {
  if (!std::isfinite(v)) return "null";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (const char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  return out + "\"";
}

JsonObject& JsonObject::add(const std::string& key, double v) {
  fields_.emplace_back(key, format_double(v));
  return *this;
}

JsonObject& JsonObject::add(const std::string& key, std::int64_t v) {
  fields_.emplace_back(key, std::to_string(v));
  return *this;
}

JsonObject& JsonObject::add(const std::string& key, std::uint64_t v) {
  fields_.emplace_back(key, std::to_string(v));
  return *this;
}

JsonObject& JsonObject::add(const std::string& key, bool v) {
  fields_.emplace_back(key, v ? "true" : "false");
  return *this;
}

JsonObject& JsonObject::add(const std::string& key, const std::string& v) {
  fields_.emplace_back(key, quote(v));
  return *this;
}

JsonObject& JsonObject::add(const std::string& key, const Vector& v) {
  std::string s = "[";
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) s += ",";
    s += format_double(v(i));
  }
  fields_.emplace_back(key, s + "]");
  return *this;
}

JsonObject& JsonObject::add(const std::string& key, const std::optional<double>& v) {
  return v ? add(key, *v) : add_null(key);
}

JsonObject& JsonObject::add(const std::string& key, const JsonObject& v) {
  fields_.emplace_back(key, v.str());
  return *this;
}

JsonObject& JsonObject::add_null(const std::string& key) {
  fields_.emplace_back(key, "null");
  return *this;
}

std::string JsonObject::str() const {
  std::string s = "{";
  bool first = true;
  for (const auto& [k, v] : fields_) {
    if (!first) s += ",";
    first = false;
    s += quote(k) + ":" + v;
  }
  return s + "}";
}

}  // namespace minimax_cubic::cli
