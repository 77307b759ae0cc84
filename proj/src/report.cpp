#include "qkz/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace qkz {

std::string json_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size() + 2);
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
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
  return out;
}

std::string json_number(double v) {
  if (std::isnan(v)) return "null";
  if (std::isinf(v)) return v > 0 ? "1e999" : "-1e999";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

JsonObject& JsonObject::field(const std::string& key, const std::string& v) {
  fields_.emplace_back(key, "\"" + json_escape(v) + "\"");
  return *this;
}
JsonObject& JsonObject::field(const std::string& key, const char* v) {
  return field(key, std::string(v));
}
JsonObject& JsonObject::field(const std::string& key, double v) {
  fields_.emplace_back(key, json_number(v));
  return *this;
}
JsonObject& JsonObject::field(const std::string& key, long v) {
  fields_.emplace_back(key, std::to_string(v));
  return *this;
}
JsonObject& JsonObject::field(const std::string& key, int v) {
  fields_.emplace_back(key, std::to_string(v));
  return *this;
}
JsonObject& JsonObject::field(const std::string& key, bool v) {
  fields_.emplace_back(key, v ? "true" : "false");
  return *this;
}
JsonObject& JsonObject::field(const std::string& key, cx v) {
  field(key + "_re", v.real());
  field(key + "_im", v.imag());
  return *this;
}
JsonObject& JsonObject::field(const std::string& key, const std::vector<double>& v) {
  std::string arr = "[";
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) arr += ",";
    arr += json_number(v[i]);
  }
  arr += "]";
  fields_.emplace_back(key, arr);
  return *this;
}

std::string JsonObject::str() const {
  std::ostringstream os;
  os << "{";
  for (size_t i = 0; i < fields_.size(); ++i) {
    if (i) os << ",";
    os << "\"" << json_escape(fields_[i].first) << "\":" << fields_[i].second;
  }
  os << "}";
  return os.str();
}

}  // namespace qkz
