#pragma once

#include <random>

#include "qkz/common.hpp"

namespace qkz {

/// Seeded generator for the polynomial-identity-testing samples. All
/// randomized checks draw from one of these so a run is reproducible from
/// the echoed seed alone.
struct Sampler {
  explicit Sampler(std::uint64_t seed) : gen(seed) {}

  double uniform(double lo, double hi) {
    return lo + (hi - lo) * std::generate_canonical<double, 53>(gen);
  }

  /// uniform modulus in [lo, hi], uniform phase
  cx annulus(double lo, double hi) {
    double m = uniform(lo, hi);
    double ph = uniform(0.0, 6.283185307179586);
    return {m * std::cos(ph), m * std::sin(ph)};
  }

  /// random complex q with 0.2 < |q| < 0.9
  cx random_q() { return annulus(0.2, 0.9); }

  /// generic point scale for t and z samples
  cx generic_point() { return annulus(0.5, 2.0); }

  long integer(long lo, long hi) {
    return lo + static_cast<long>(std::floor(uniform(0.0, 1.0) * (hi - lo + 1)));
  }

  std::mt19937_64 gen;
};

}  // namespace qkz
