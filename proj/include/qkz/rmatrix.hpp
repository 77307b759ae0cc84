#pragma once

#include "qkz/qspecial.hpp"
#include "qkz/repr.hpp"

namespace qkz {

/// Trigonometric R-matrix on V^{(l1)} (x) V^{(l2)} at spectral ratio z,
/// normalized so that P R maps v_0 (x) v_0 to v_0 (x) v_0.
struct RMatrix {
  long l1 = 0;
  long l2 = 0;
  cx z;
  Matrix m;             // acts on (m1, m2) -> m1*(l2+1)+m2 ordering
  bool normalized = false;
  double sv_gap = 0.0;  // second-smallest singular value of the constraint stack
};

/// Solve the intertwining conditions as a null-space problem: P R must
/// commute with the coproduct action on V^{(l1)}_z (x) V^{(l2)}_1.
/// Throws Degenerate if the null space is not one-dimensional and
/// Resonant if the normalizing component vanishes.
RMatrix solve_R(long l1, long l2, cx z, cx q);

/// Closed form for l1 = 1 or l2 = 1.
RMatrix closed_form_R(long l1, long l2, cx z, cx q);

/// R~ = (C (x) C) R (C (x) C).
RMatrix r_tilde(const RMatrix& r);

/// R^ = rho_{l1,l2}(z) R~, built from solve_R.
RMatrix r_hat(long l1, long l2, cx z, cx q, const TruncationPolicy& trunc);

/// Normalized Frobenius residual of
/// R12(z12) R13(z12 z23) R23(z23) - R23 R13 R12 on V1 (x) V2 (x) V3.
double ybe_residual(long l1, long l2, long l3, cx z12, cx z23, cx q);

}  // namespace qkz
