#include "qkz/config.hpp"

#include <fstream>
#include <sstream>

#include "qkz/report.hpp"

namespace qkz {

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::vector<long> parse_long_list(const std::string& v) {
  std::vector<long> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    size_t pos = 0;
    long x = std::stol(item, &pos);
    if (pos != item.size())
      fail(Error::Kind::Config, "config: bad integer list entry '" + item + "'");
    out.push_back(x);
  }
  return out;
}

double parse_double(const std::string& key, const std::string& v) {
  size_t pos = 0;
  double x = 0.0;
  try {
    x = std::stod(v, &pos);
  } catch (const std::exception&) {
    fail(Error::Kind::Config, "config: bad number for " + key + ": '" + v + "'");
  }
  if (pos != v.size())
    fail(Error::Kind::Config, "config: trailing junk for " + key + ": '" + v + "'");
  return x;
}

}  // namespace

ModelParams RunConfig::params() const {
  return derive(cx(q, 0.0), cx(k, 0.0), cx(L, 0.0), spins, N);
}

TruncationPolicy RunConfig::trunc() const {
  return TruncationPolicy{static_cast<int>(max_terms), tail_tol};
}

std::string RunConfig::echo() const {
  std::ostringstream os;
  os << "q=" << json_number(q) << " k=" << json_number(k) << " L="
     << json_number(L) << " spins=";
  for (size_t i = 0; i < spins.size(); ++i) {
    if (i) os << ",";
    os << spins[i];
  }
  os << " N=" << N << " max_terms=" << max_terms
     << " tail_tol=" << json_number(tail_tol) << " quad_points=" << quad_points
     << " seed=" << seed;
  return os.str();
}

RunConfig parse_config_text(const std::string& text) {
  RunConfig cfg;
  std::stringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) {
    size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    size_t eq = line.find('=');
    if (eq == std::string::npos)
      fail(Error::Kind::Config, "config: expected 'key = value', got '" + line + "'");
    std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));
    if (key == "q")
      cfg.q = parse_double(key, val);
    else if (key == "k")
      cfg.k = parse_double(key, val);
    else if (key == "L")
      cfg.L = parse_double(key, val);
    else if (key == "spins")
      cfg.spins = parse_long_list(val);
    else if (key == "N")
      cfg.N = static_cast<long>(parse_double(key, val));
    else if (key == "max_terms")
      cfg.max_terms = static_cast<long>(parse_double(key, val));
    else if (key == "tail_tol")
      cfg.tail_tol = parse_double(key, val);
    else if (key == "quad_points")
      cfg.quad_points = static_cast<long>(parse_double(key, val));
    else if (key == "seed")
      cfg.seed = static_cast<std::uint64_t>(parse_double(key, val));
    else
      fail(Error::Kind::Config, "config: unknown key '" + key + "'");
  }
  return cfg;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(Error::Kind::Config, "config: cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

}  // namespace qkz
