#include "qkz/repr.hpp"

#include "qkz/qspecial.hpp"

namespace qkz {

Gen gen_from_name(const std::string& name) {
  if (name == "e0") return Gen::e0;
  if (name == "e1") return Gen::e1;
  if (name == "f0") return Gen::f0;
  if (name == "f1") return Gen::f1;
  if (name == "qh0") return Gen::qh0;
  if (name == "qh1") return Gen::qh1;
  if (name == "qd") return Gen::qd;
  fail(Error::Kind::Domain, "unknown generator tag: " + name);
}

std::vector<GradedTerm> act_generator(Gen g, long l, long i, long zpow, cx q) {
  if (i < 0 || i > l) fail(Error::Kind::Domain, "act_generator: index out of range");
  std::vector<GradedTerm> out;
  auto push = [&](long idx, long zp, cx c) {
    if (idx < 0 || idx > l || c == cx(0.0, 0.0)) return;
    out.push_back({idx, zp, c});
  };
  switch (g) {
    case Gen::e0: push(i + 1, zpow + 1, qint(l - i, q)); break;
    case Gen::e1: push(i - 1, zpow, qint(i, q)); break;
    case Gen::f0: push(i - 1, zpow - 1, qint(i, q)); break;
    case Gen::f1: push(i + 1, zpow, qint(l - i, q)); break;
    case Gen::qh0: push(i, zpow, qpow(q, cx(static_cast<double>(-(l - 2 * i)), 0.0))); break;
    case Gen::qh1: push(i, zpow, qpow(q, cx(static_cast<double>(l - 2 * i), 0.0))); break;
    case Gen::qd: push(i, zpow, qpow(q, cx(static_cast<double>(zpow), 0.0))); break;
  }
  return out;
}

Matrix generator_matrix(Gen g, long l, cx z, cx q) {
  Matrix m = Matrix::Zero(l + 1, l + 1);
  for (long i = 0; i <= l; ++i) {
    for (const GradedTerm& t : act_generator(g, l, i, 0, q)) {
      cx zfac = t.zpow == 0 ? cx(1.0, 0.0) : qpow(z, cx(static_cast<double>(t.zpow), 0.0));
      m(t.index, i) += t.coeff * zfac;
    }
  }
  return m;
}

Matrix flip_C(long l) {
  Matrix m = Matrix::Zero(l + 1, l + 1);
  for (long i = 0; i <= l; ++i) m(l - i, i) = 1.0;
  return m;
}

Matrix coproduct_two_site(Gen g, long l1, long l2, cx z1, cx z2, cx q) {
  long d1 = l1 + 1, d2 = l2 + 1;
  auto kron = [&](const Matrix& a, const Matrix& b) {
    Matrix r(d1 * d2, d1 * d2);
    for (long i = 0; i < d1; ++i)
      for (long j = 0; j < d1; ++j)
        r.block(i * d2, j * d2, d2, d2) = a(i, j) * b;
    return r;
  };
  Matrix id1 = Matrix::Identity(d1, d1), id2 = Matrix::Identity(d2, d2);
  switch (g) {
    case Gen::e0:
    case Gen::e1: {
      Gen h = (g == Gen::e0) ? Gen::qh0 : Gen::qh1;
      return kron(generator_matrix(g, l1, z1, q), id2) +
             kron(generator_matrix(h, l1, z1, q), generator_matrix(g, l2, z2, q));
    }
    case Gen::f0:
    case Gen::f1: {
      Gen h = (g == Gen::f0) ? Gen::qh0 : Gen::qh1;
      Matrix qh_inv = generator_matrix(h, l2, z2, q).inverse();
      return kron(generator_matrix(g, l1, z1, q), qh_inv) +
             kron(id1, generator_matrix(g, l2, z2, q));
    }
    case Gen::qh0:
    case Gen::qh1:
      return kron(generator_matrix(g, l1, z1, q), generator_matrix(g, l2, z2, q));
    default:
      fail(Error::Kind::Domain, "coproduct_two_site: unsupported generator");
  }
}

TensorVector::TensorVector(std::vector<long> spins_) : spins(std::move(spins_)) {
  long d = 1;
  for (long l : spins) {
    if (l < 0) fail(Error::Kind::Domain, "TensorVector: negative spin");
    d *= (l + 1);
  }
  coeffs.assign(d, cx(0.0, 0.0));
}

long TensorVector::flat_index(const std::vector<long>& m) const {
  if (m.size() != spins.size())
    fail(Error::Kind::Domain, "TensorVector: multi-index arity mismatch");
  long idx = 0;
  for (size_t i = 0; i < m.size(); ++i) {
    if (m[i] < 0 || m[i] > spins[i])
      fail(Error::Kind::Domain, "TensorVector: multi-index out of bounds");
    idx = idx * (spins[i] + 1) + m[i];
  }
  return idx;
}

std::vector<long> TensorVector::multi_index(long flat) const {
  std::vector<long> m(spins.size());
  for (size_t i = spins.size(); i-- > 0;) {
    m[i] = flat % (spins[i] + 1);
    flat /= (spins[i] + 1);
  }
  return m;
}

long TensorVector::weight_of(long flat) const {
  auto m = multi_index(flat);
  long w = 0;
  for (size_t i = 0; i < m.size(); ++i) w += spins[i] - 2 * m[i];
  return w;
}

double TensorVector::max_norm() const {
  double r = 0.0;
  for (const cx& c : coeffs) r = std::max(r, std::abs(c));
  return r;
}

TensorVector apply_two_site(const TwoSiteOperator& op, const TensorVector& v) {
  long n = v.n_sites();
  if (op.leg_i < 0 || op.leg_i >= n || op.leg_j < 0 || op.leg_j >= n ||
      op.leg_i == op.leg_j)
    fail(Error::Kind::Domain, "apply_two_site: bad legs");
  long di = v.spins[op.leg_i] + 1, dj = v.spins[op.leg_j] + 1;
  if (op.m.rows() != di * dj || op.m.cols() != di * dj)
    fail(Error::Kind::Domain, "apply_two_site: operator shape mismatch");

  TensorVector out(v.spins);
  for (long flat = 0; flat < v.dim(); ++flat) {
    if (v.coeffs[flat] == cx(0.0, 0.0)) continue;
    auto m = v.multi_index(flat);
    long col = m[op.leg_i] * dj + m[op.leg_j];
    for (long mi = 0; mi < di; ++mi) {
      for (long mj = 0; mj < dj; ++mj) {
        cx entry = op.m(mi * dj + mj, col);
        if (entry == cx(0.0, 0.0)) continue;
        auto mm = m;
        mm[op.leg_i] = mi;
        mm[op.leg_j] = mj;
        out.coeffs[out.flat_index(mm)] += entry * v.coeffs[flat];
      }
    }
  }
  return out;
}

TensorVector apply_one_site(long leg, const Matrix& m, const TensorVector& v) {
  long n = v.n_sites();
  if (leg < 0 || leg >= n) fail(Error::Kind::Domain, "apply_one_site: bad leg");
  long d = v.spins[leg] + 1;
  if (m.rows() != d || m.cols() != d)
    fail(Error::Kind::Domain, "apply_one_site: operator shape mismatch");
  TensorVector out(v.spins);
  for (long flat = 0; flat < v.dim(); ++flat) {
    if (v.coeffs[flat] == cx(0.0, 0.0)) continue;
    auto idx = v.multi_index(flat);
    long old = idx[leg];
    for (long mi = 0; mi < d; ++mi) {
      cx entry = m(mi, old);
      if (entry == cx(0.0, 0.0)) continue;
      idx[leg] = mi;
      out.coeffs[out.flat_index(idx)] += entry * v.coeffs[flat];
    }
    idx[leg] = old;
  }
  return out;
}

}  // namespace qkz
