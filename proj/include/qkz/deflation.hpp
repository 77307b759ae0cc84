#pragma once

#include <vector>

#include "qkz/common.hpp"

namespace qkz {

/// Tag attached to a residue-correction term. It tells each factor of the
/// integrand which catalogued simple pole of variable `var` was pinned, so
/// the vanishing factor can be divided out analytically instead of being
/// evaluated as 0/0.
///
/// Families (c is the pole location):
///   ZInside   c = p^s q^{-l_j} z_j   (s >= 0; s = 0 pairs a phase-function
///                                     zero with a weight-function pole)
///   ZOutside  c = p^{-s} q^{l_j} z_j (phase-function denominator)
///   TTInside  c = p^s q^2 t_b        (b an outer variable)
///   TTOutside c = p^{-s} q^{-2} t_b
struct Deflation {
  enum class Family { ZInside, ZOutside, TTInside, TTOutside };
  int var = 0;      // t-variable index (0-based)
  Family family = Family::ZInside;
  int partner = 0;  // site j for Z-families, outer t index b for TT-families
  long s = 0;       // p-power labelling the pole within its family
};

using DeflationSet = std::vector<Deflation>;

inline bool has_deflation(const DeflationSet& ds, int var, Deflation::Family fam,
                          int partner, long s) {
  for (const auto& d : ds)
    if (d.var == var && d.family == fam && d.partner == partner && d.s == s)
      return true;
  return false;
}

}  // namespace qkz
