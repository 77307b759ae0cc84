#include "doctest.h"
#include "qkz/repr.hpp"
#include "qkz/qspecial.hpp"
#include "qkz/sampling.hpp"

using namespace qkz;

namespace {
double rel(cx a, cx b) { return std::abs(a - b) / (std::abs(a) + std::abs(b) + 1e-300); }
}  // namespace

TEST_CASE("generator actions match the evaluation-module table") {
  cx q{0.55, 0.0};
  // e1 annihilates v_0
  CHECK(act_generator(Gen::e1, 3, 0, 0, q).empty());
  // q^{h1} v_i = q^{l-2i} v_i
  for (long l = 0; l <= 3; ++l)
    for (long i = 0; i <= l; ++i) {
      auto terms = act_generator(Gen::qh1, l, i, 0, q);
      REQUIRE(terms.size() == 1);
      CHECK(terms[0].index == i);
      CHECK(rel(terms[0].coeff, qpow(q, cx(double(l - 2 * i), 0))) < 1e-15);
    }
  // f0 v_i (x) z^n = [i] v_{i-1} (x) z^{n-1}
  auto f0 = act_generator(Gen::f0, 2, 2, 5, q);
  REQUIRE(f0.size() == 1);
  CHECK(f0[0].index == 1);
  CHECK(f0[0].zpow == 4);
  CHECK(rel(f0[0].coeff, qint(2, q)) < 1e-15);
  CHECK_THROWS_AS(act_generator(Gen::e0, 2, 5, 0, q), Error);
  CHECK_THROWS_AS(gen_from_name("bogus"), Error);
}

TEST_CASE("sl2 commutation on every V^l, l <= 4") {
  cx q{0.43, 0.17};
  cx z{1.3, -0.4};
  for (long l = 0; l <= 4; ++l) {
    Matrix e = generator_matrix(Gen::e1, l, z, q);
    Matrix f = generator_matrix(Gen::f1, l, z, q);
    Matrix qh = generator_matrix(Gen::qh1, l, z, q);
    Matrix lhs = e * f - f * e;
    Matrix rhs = (qh - qh.inverse()) / (q - 1.0 / q);
    CHECK((lhs - rhs).norm() < 1e-12 * (1.0 + rhs.norm()));
  }
}

TEST_CASE("coproduct convention test vectors") {
  cx q{0.6, 0.0};
  // D(q^{h1}) on v_0 (x) v_0 at l1 = l2 = 1: weights add to q^2
  Matrix dh = coproduct_two_site(Gen::qh1, 1, 1, cx(1.0, 0.0), cx(1.0, 0.0), q);
  CHECK(rel(dh(0, 0), q * q) < 1e-15);
  // D(e1)(v_1 (x) v_1) = [1] v_0 (x) v_1 + q^{-1} [1] v_1 (x) v_0
  Matrix de = coproduct_two_site(Gen::e1, 1, 1, cx(1.0, 0.0), cx(1.0, 0.0), q);
  CHECK(rel(de(1, 3), cx(1.0, 0.0)) < 1e-15);       // v_0 v_1 from v_1 v_1
  CHECK(rel(de(2, 3), 1.0 / q) < 1e-15);            // v_1 v_0 from v_1 v_1
  // D(f1)(v_0 (x) v_0) = q^{-1} v_1 (x) v_0 + v_0 (x) v_1
  Matrix df = coproduct_two_site(Gen::f1, 1, 1, cx(1.0, 0.0), cx(1.0, 0.0), q);
  CHECK(rel(df(2, 0), 1.0 / q) < 1e-15);
  CHECK(rel(df(1, 0), cx(1.0, 0.0)) < 1e-15);
  // weight additivity: D(q^{h1}) diagonal with q^{(l1-2m1)+(l2-2m2)}
  Matrix dh23 = coproduct_two_site(Gen::qh1, 2, 3, cx(1.1, 0.0), cx(0.8, 0.0), q);
  for (long m1 = 0; m1 <= 2; ++m1)
    for (long m2 = 0; m2 <= 3; ++m2) {
      long idx = m1 * 4 + m2;
      CHECK(rel(dh23(idx, idx),
                qpow(q, cx(double(2 - 2 * m1 + 3 - 2 * m2), 0))) < 1e-14);
    }
}

TEST_CASE("flip is an involution") {
  TensorVector v({2, 1});
  Sampler smp(3);
  for (auto& c : v.coeffs) c = smp.generic_point();
  CHECK((flip_C(0) - Matrix::Identity(1, 1)).norm() == 0.0);
  Matrix c1 = flip_C(1);
  CHECK(c1(0, 1) == cx(1.0, 0.0));
  CHECK(c1(1, 0) == cx(1.0, 0.0));
  TensorVector w = apply_one_site(0, flip_C(2), apply_one_site(1, flip_C(1), v));
  w = apply_one_site(0, flip_C(2), apply_one_site(1, flip_C(1), w));
  for (long i = 0; i < v.dim(); ++i) CHECK(rel(w.coeffs[i], v.coeffs[i]) < 1e-15);
}

TEST_CASE("two-site application") {
  // identity is neutral
  TensorVector v({1, 2, 1});
  Sampler smp(8);
  for (auto& c : v.coeffs) c = smp.generic_point();
  TwoSiteOperator id{0, 2, Matrix::Identity(4, 4)};
  TensorVector w = apply_two_site(id, v);
  for (long i = 0; i < v.dim(); ++i) CHECK(rel(w.coeffs[i], v.coeffs[i]) < 1e-15);

  // permutation on legs (0, 1) maps v_0 v_1 pattern to v_1 v_0
  TensorVector u({1, 1});
  u.coeffs[u.flat_index({0, 1})] = 1.0;
  Matrix p = Matrix::Zero(4, 4);
  p(0 * 2 + 0, 0) = 1;
  p(1 * 2 + 0, 0 * 2 + 1) = 1;
  p(0 * 2 + 1, 1 * 2 + 0) = 1;
  p(1 * 2 + 1, 3) = 1;
  TensorVector pu = apply_two_site({0, 1, p}, u);
  CHECK(rel(pu.coeffs[pu.flat_index({1, 0})], cx(1.0, 0.0)) < 1e-15);

  // disjoint-leg operators commute
  TensorVector big({1, 1, 1, 1});
  for (auto& c : big.coeffs) c = smp.generic_point();
  Matrix a(4, 4), b(4, 4);
  for (long i = 0; i < 4; ++i)
    for (long j = 0; j < 4; ++j) {
      a(i, j) = smp.generic_point();
      b(i, j) = smp.generic_point();
    }
  TensorVector ab = apply_two_site({2, 3, b}, apply_two_site({0, 1, a}, big));
  TensorVector ba = apply_two_site({0, 1, a}, apply_two_site({2, 3, b}, big));
  for (long i = 0; i < big.dim(); ++i)
    CHECK(std::abs(ab.coeffs[i] - ba.coeffs[i]) < 1e-14 * big.max_norm());

  // shape mismatch
  CHECK_THROWS_AS(apply_two_site({0, 1, Matrix::Identity(3, 3)}, u), Error);
  CHECK_THROWS_AS(apply_two_site({0, 0, Matrix::Identity(4, 4)}, u), Error);
}

TEST_CASE("weights of basis vectors") {
  TensorVector v({2, 1});
  CHECK(v.weight_of(v.flat_index({0, 0})) == 3);
  CHECK(v.weight_of(v.flat_index({2, 1})) == -3);
  CHECK(v.weight_of(v.flat_index({1, 0})) == 1);
}
