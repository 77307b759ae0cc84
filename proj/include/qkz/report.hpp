#pragma once

#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "qkz/common.hpp"

namespace qkz {

/// Minimal JSON-lines writer. Numbers are printed with 17 significant
/// digits so serial reruns are byte-identical.
class JsonObject {
 public:
  JsonObject& field(const std::string& key, const std::string& v);
  JsonObject& field(const std::string& key, const char* v);
  JsonObject& field(const std::string& key, double v);
  JsonObject& field(const std::string& key, long v);
  JsonObject& field(const std::string& key, int v);
  JsonObject& field(const std::string& key, bool v);
  JsonObject& field(const std::string& key, cx v);  // _re/_im pair
  JsonObject& field(const std::string& key, const std::vector<double>& v);

  std::string str() const;

 private:
  std::vector<std::pair<std::string, std::string>> fields_;
};

std::string json_escape(const std::string& s);
std::string json_number(double v);

}  // namespace qkz
