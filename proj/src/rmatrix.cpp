#include "qkz/rmatrix.hpp"

#include <Eigen/SVD>

namespace qkz {

namespace {

Matrix flip_matrix(long l1, long l2) {
  long d1 = l1 + 1, d2 = l2 + 1;
  Matrix p = Matrix::Zero(d1 * d2, d1 * d2);
  for (long a = 0; a < d1; ++a)
    for (long b = 0; b < d2; ++b) p(b * d1 + a, a * d2 + b) = 1.0;
  return p;  // V1 (x) V2 -> V2 (x) V1
}

}  // namespace

RMatrix solve_R(long l1, long l2, cx z, cx q) {
  const long d1 = l1 + 1, d2 = l2 + 1, d = d1 * d2;
  // X = P R intertwines D(g) on V1_z (x) V2_1 with D(g) on V2_1 (x) V1_z:
  //   X M1(g) = M2(g) X.
  const Gen gens[] = {Gen::e0, Gen::e1, Gen::f0, Gen::f1, Gen::qh0, Gen::qh1};
  Matrix A = Matrix::Zero(6 * d * d, d * d);
  long row0 = 0;
  for (Gen g : gens) {
    Matrix m1 = coproduct_two_site(g, l1, l2, z, cx(1.0, 0.0), q);
    Matrix m2 = coproduct_two_site(g, l2, l1, cx(1.0, 0.0), z, q);
    // vec(X M1 - M2 X) = (M1^T kron I - I kron M2) vec(X), column-major vec
    for (long i = 0; i < d; ++i)
      for (long j = 0; j < d; ++j) {
        // block (i,j) of M1^T kron I is m1(j,i) * I; of I kron M2 it is
        // delta_ij * M2
        for (long r = 0; r < d; ++r) {
          A(row0 + i * d + r, j * d + r) += m1(j, i);
          if (i == j)
            for (long c = 0; c < d; ++c) A(row0 + i * d + r, j * d + c) -= m2(r, c);
        }
      }
    row0 += d * d;
  }

  Eigen::JacobiSVD<Matrix> svd(A, Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  double smallest = sv(d * d - 1);
  double second = sv(d * d - 2);
  double scale = sv(0);
  double eps = std::numeric_limits<double>::epsilon();
  if (second < 1e6 * eps * scale)
    fail(Error::Kind::Degenerate,
         "solve_R: intertwiner space dimension > 1 (sv gap " +
             std::to_string(second / scale) + ")");
  if (smallest > 1e-8 * scale)
    fail(Error::Kind::Degenerate,
         "solve_R: no intertwiner found (residual " +
             std::to_string(smallest / scale) + ")");

  Vector xv = svd.matrixV().col(d * d - 1);
  Matrix X(d, d);
  for (long j = 0; j < d; ++j)
    for (long i = 0; i < d; ++i) X(i, j) = xv(j * d + i);

  // condition (ii): X (v_0 (x) v_0) = v_0 (x) v_0 in the flipped ordering
  cx lam = X(0, 0);
  if (std::abs(lam) < 1e-10 * X.norm())
    fail(Error::Kind::Resonant, "solve_R: normalizing component vanishes");
  X /= lam;

  RMatrix r;
  r.l1 = l1;
  r.l2 = l2;
  r.z = z;
  r.m = flip_matrix(l2, l1) * X;  // R = P^{-1} X, P^{-1}: V2 (x) V1 -> V1 (x) V2
  r.normalized = true;
  r.sv_gap = second / scale;
  return r;
}

RMatrix closed_form_R(long l1, long l2, cx z, cx q) {
  if (l1 != 1 && l2 != 1)
    fail(Error::Kind::Domain, "closed_form_R: need l1 = 1 or l2 = 1");
  RMatrix r;
  r.l1 = l1;
  r.l2 = l2;
  r.z = z;
  r.normalized = true;

  cx qq = q - 1.0 / q;
  if (l1 == 1) {
    // R(v_eps (x) v_j) = sum_eps' v_eps' (x) r_{eps' eps}(z) v_j,
    // r entries are operators in h = h_1, e = e_1, f = f_1 on V^{(l2)}.
    long d2 = l2 + 1;
    Matrix e = generator_matrix(Gen::e1, l2, cx(1.0, 0.0), q);
    Matrix f = generator_matrix(Gen::f1, l2, cx(1.0, 0.0), q);
    auto qh = [&](double s) {  // q^{s h} diagonal
      Matrix m = Matrix::Zero(d2, d2);
      for (long j = 0; j < d2; ++j)
        m(j, j) = qpow(q, cx(s * static_cast<double>(l2 - 2 * j), 0.0));
      return m;
    };
    cx zi = 1.0 / z;
    cx den = qpow(q, cx(1.0 + l2 / 2.0, 0.0)) - zi * qpow(q, cx(-l2 / 2.0, 0.0));
    Matrix r00 = (qpow(q, cx(1.0, 0.0)) * qh(0.5) - zi * qh(-0.5)) / den;
    Matrix r01 = (qq * zi) * (f * qh(0.5)) / den;
    Matrix r10 = qq * (e * qh(-0.5)) / den;
    Matrix r11 = (qpow(q, cx(1.0, 0.0)) * qh(-0.5) - zi * qh(0.5)) / den;
    Matrix m = Matrix::Zero(2 * d2, 2 * d2);
    m.block(0, 0, d2, d2) = r00;
    m.block(0, d2, d2, d2) = r01;
    m.block(d2, 0, d2, d2) = r10;
    m.block(d2, d2, d2, d2) = r11;
    r.m = m;
    return r;
  }

  // l2 == 1: R(v_j (x) v_eps) = sum_eps' r_{eps' eps}(z) v_j (x) v_eps',
  // operators act on V^{(l1)}.
  long d1 = l1 + 1;
  Matrix e = generator_matrix(Gen::e1, l1, cx(1.0, 0.0), q);
  Matrix f = generator_matrix(Gen::f1, l1, cx(1.0, 0.0), q);
  auto qh = [&](double s) {
    Matrix m = Matrix::Zero(d1, d1);
    for (long j = 0; j < d1; ++j)
      m(j, j) = qpow(q, cx(s * static_cast<double>(l1 - 2 * j), 0.0));
    return m;
  };
  cx den = z * qpow(q, cx(l1 / 2.0, 0.0)) - qpow(q, cx(-1.0 - l1 / 2.0, 0.0));
  Matrix r00 = (z * qh(0.5) - qpow(q, cx(-1.0, 0.0)) * qh(-0.5)) / den;
  Matrix r01 = (qq * z) * (qh(0.5) * f) / den;
  Matrix r10 = qq * (qh(-0.5) * e) / den;
  Matrix r11 = (z * qh(-0.5) - qpow(q, cx(-1.0, 0.0)) * qh(0.5)) / den;
  // full matrix entry R[(j', eps'), (j, eps)] = <v_j'| r_{eps' eps} |v_j>
  Matrix m = Matrix::Zero(2 * d1, 2 * d1);
  for (long jp = 0; jp < d1; ++jp)
    for (long j = 0; j < d1; ++j) {
      m(jp * 2 + 0, j * 2 + 0) = r00(jp, j);
      m(jp * 2 + 0, j * 2 + 1) = r01(jp, j);
      m(jp * 2 + 1, j * 2 + 0) = r10(jp, j);
      m(jp * 2 + 1, j * 2 + 1) = r11(jp, j);
    }
  r.m = m;
  return r;
}

RMatrix r_tilde(const RMatrix& r) {
  long d1 = r.l1 + 1, d2 = r.l2 + 1;
  Matrix cc = Matrix::Zero(d1 * d2, d1 * d2);
  for (long a = 0; a < d1; ++a)
    for (long b = 0; b < d2; ++b)
      cc((d1 - 1 - a) * d2 + (d2 - 1 - b), a * d2 + b) = 1.0;
  RMatrix out = r;
  out.m = cc * r.m * cc;
  return out;
}

RMatrix r_hat(long l1, long l2, cx z, cx q, const TruncationPolicy& trunc) {
  RMatrix r = solve_R(l1, l2, z, q);
  SeriesValue s = rho(z, l1, l2, q, trunc);
  if (s.near_pole())
    fail(Error::Kind::PoleHit, "r_hat: rho evaluated too close to a pole");
  RMatrix out = r_tilde(r);
  out.m *= s.value;
  return out;
}

double ybe_residual(long l1, long l2, long l3, cx z12, cx z23, cx q) {
  cx z13 = z12 * z23;
  TensorVector probe({l1, l2, l3});
  TwoSiteOperator r12{0, 1, solve_R(l1, l2, z12, q).m};
  TwoSiteOperator r13{0, 2, solve_R(l1, l3, z13, q).m};
  TwoSiteOperator r23{1, 2, solve_R(l2, l3, z23, q).m};

  long d = probe.dim();
  double num = 0.0, den = 0.0;
  for (long col = 0; col < d; ++col) {
    TensorVector v({l1, l2, l3});
    v.coeffs[col] = 1.0;
    TensorVector lhs = apply_two_site(r12, apply_two_site(r13, apply_two_site(r23, v)));
    TensorVector rhs = apply_two_site(r23, apply_two_site(r13, apply_two_site(r12, v)));
    for (long row = 0; row < d; ++row) {
      num += std::norm(lhs.coeffs[row] - rhs.coeffs[row]);
      den += std::norm(lhs.coeffs[row]) + std::norm(rhs.coeffs[row]);
    }
  }
  return std::sqrt(num) / std::max(std::sqrt(den), 1e-300);
}

}  // namespace qkz
