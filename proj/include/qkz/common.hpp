#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace qkz {

using cx = std::complex<double>;

inline constexpr double kNearPoleEps = 1e-13;

// Typed failure so the CLI can map error classes to exit codes.
struct Error : std::runtime_error {
  enum class Kind {
    Domain,         // parameter outside the admissible region
    Config,         // unparsable configuration / bad CLI usage
    Infeasible,     // no valid contour for these parameters
    Degenerate,     // intertwiner null space dimension != 1
    Resonant,       // normalizing component vanishes
    PoleHit,        // evaluation point on (or too close to) a pole
    NonSimplePole,  // two catalogued poles collide
    Numerical,      // quadrature divergence or similar
  };

  Error(Kind k, const std::string& msg) : std::runtime_error(msg), kind(k) {}
  Kind kind;
};

[[noreturn]] inline void fail(Error::Kind k, const std::string& msg) {
  throw Error(k, msg);
}

}  // namespace qkz
