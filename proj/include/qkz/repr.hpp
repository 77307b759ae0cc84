#pragma once

#include <Eigen/Dense>
#include <vector>

#include "qkz/common.hpp"

namespace qkz {

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

enum class Gen { e0, e1, f0, f1, qh0, qh1, qd };

Gen gen_from_name(const std::string& name);

/// One term of a graded generator action: coeff * v_index (x) z^{zpow}.
struct GradedTerm {
  long index;
  long zpow;
  cx coeff;
};

/// Action of a generator on the basis vector v_i (x) z^{zpow} of the
/// (l+1)-dimensional evaluation module. Terms whose target index leaves
/// [0, l] are dropped (their [0]-type coefficients vanish).
std::vector<GradedTerm> act_generator(Gen g, long l, long i, long zpow, cx q);

/// Generator matrix on V^{(l)} at a numeric evaluation point z
/// (the z-grading collapses onto z^{+-1} coefficients).
Matrix generator_matrix(Gen g, long l, cx z, cx q);

/// Flip C_l: v_eps -> v_{l-eps}; an involution.
Matrix flip_C(long l);

/// Matrix of the coproduct of a Chevalley generator on
/// V^{(l1)}_{z1} (x) V^{(l2)}_{z2}, convention
///   D(e) = e (x) 1 + q^h (x) e,   D(f) = f (x) q^{-h} + 1 (x) f,
///   D(q^h) = q^h (x) q^h.
/// Basis ordering: (m1, m2) -> m1*(l2+1) + m2.
Matrix coproduct_two_site(Gen g, long l1, long l2, cx z1, cx z2, cx q);

/// Complex vector in V^{(l1)} (x) ... (x) V^{(ln)}, coefficients indexed
/// row-major by the weight multi-index (m_1..m_n), 0 <= m_i <= l_i.
struct TensorVector {
  std::vector<long> spins;
  std::vector<cx> coeffs;

  explicit TensorVector(std::vector<long> spins_);
  long dim() const { return static_cast<long>(coeffs.size()); }
  long n_sites() const { return static_cast<long>(spins.size()); }
  long flat_index(const std::vector<long>& m) const;
  std::vector<long> multi_index(long flat) const;
  /// weight of the basis vector at `flat`: sum_i (l_i - 2 m_i)
  long weight_of(long flat) const;
  double max_norm() const;
};

/// Complex matrix acting on two specified tensor legs. The matrix acts on
/// V^{(l_i)} (x) V^{(l_j)} with leg `i` as the first factor.
struct TwoSiteOperator {
  long leg_i;
  long leg_j;
  Matrix m;
};

TensorVector apply_two_site(const TwoSiteOperator& op, const TensorVector& v);

/// Apply a single-site operator (matrix on V^{(l_leg)}) to one leg.
TensorVector apply_one_site(long leg, const Matrix& m, const TensorVector& v);

}  // namespace qkz
