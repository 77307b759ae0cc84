#pragma once

#include <string>
#include <vector>

#include "qkz/params.hpp"
#include "qkz/qspecial.hpp"

namespace qkz {

/// Flat key-value run configuration. Keys: q, k, L, spins, N, max_terms,
/// tail_tol, quad_points, seed. Lines are `key = value`, `#` comments.
struct RunConfig {
  double q = 0.6;
  double k = 1.0;
  double L = 0.3;
  std::vector<long> spins{1, 1};
  long N = 1;
  long max_terms = 400;
  double tail_tol = 1e-18;
  long quad_points = 512;
  std::uint64_t seed = 20090307;

  ModelParams params() const;
  TruncationPolicy trunc() const;
  std::string echo() const;  // canonical one-line form for reports
};

RunConfig parse_config_file(const std::string& path);
RunConfig parse_config_text(const std::string& text);

}  // namespace qkz
