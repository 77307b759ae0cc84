#pragma once

#include <vector>

#include "qkz/common.hpp"

namespace qkz {

/// All global model parameters plus the derived constants every other
/// module consumes. Immutable after derive(); safe to share across threads.
struct ModelParams {
  cx q;                        // deformation parameter, |q| < 1
  cx k;                        // level
  cx p;                        // q^{2(k+2)}, |p| < 1
  cx L;                        // highest-weight label
  std::vector<long> spins;     // l_1 .. l_n
  long N = 0;                  // number of integration variables
  cx kappa;                    // q^{-2(L + sum l_i/2 - N + 1)}
  std::vector<cx> a_exponents; // a_i = l_i/(2(k+2)) (L + sum l_j - l_i/2 - N + 1)
  bool contour_feasible = false;

  long n_sites() const { return static_cast<long>(spins.size()); }
  long sum_spins() const;
  long max_spin() const;
};

/// Populate every derived field; rejects |q| >= 1, |p| >= 1, N < 0,
/// empty or negative spins.
ModelParams derive(cx q, cx k, cx L, std::vector<long> spins, long N);

/// Conformal-weight helper Delta_j = j(j+2) / (4(k+2)); rejects k = -2.
cx delta_weight(cx j, cx k);

}  // namespace qkz
