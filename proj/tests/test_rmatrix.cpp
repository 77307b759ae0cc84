#include "doctest.h"
#include "qkz/rmatrix.hpp"
#include "qkz/sampling.hpp"

using namespace qkz;

namespace {
const TruncationPolicy kTrunc{400, 1e-18};
double rel(cx a, cx b) { return std::abs(a - b) / (std::abs(a) + std::abs(b) + 1e-300); }
}  // namespace

TEST_CASE("closed form spin-(1,1) entries") {
  cx q{0.6, 0.0};
  cx z{1.7, 0.3};
  RMatrix r = closed_form_R(1, 1, z, q);
  cx zi = 1.0 / z;
  // R(v0 (x) v0) = v0 (x) v0 and R(v1 (x) v1) = v1 (x) v1
  CHECK(rel(r.m(0, 0), cx(1.0, 0.0)) < 1e-13);
  CHECK(rel(r.m(3, 3), cx(1.0, 0.0)) < 1e-13);
  // hand-evaluated middle block
  cx b = q * (1.0 - zi) / (q * q - zi);
  cx c = (q * q - 1.0) / (q * q - zi);
  CHECK(rel(r.m(1, 1), b) < 1e-13);
  CHECK(rel(r.m(2, 1), c) < 1e-13);
}

TEST_CASE("R_{1,0} is the identity") {
  RMatrix r = closed_form_R(1, 0, cx(2.2, 0.1), cx(0.5, 0.0));
  CHECK((r.m - Matrix::Identity(2, 2)).norm() < 1e-13);
  CHECK_THROWS_AS(closed_form_R(2, 3, cx(2.0, 0.0), cx(0.5, 0.0)), Error);
}

TEST_CASE("solver agrees with closed form for (1,l) and (l,1)") {
  Sampler smp(17);
  cx q{0.6, 0.0};
  for (long l = 0; l <= 3; ++l) {
    for (int trial = 0; trial < 4; ++trial) {
      cx z = smp.annulus(0.4, 2.5);
      RMatrix a = solve_R(1, l, z, q);
      RMatrix b = closed_form_R(1, l, z, q);
      CHECK((a.m - b.m).cwiseAbs().maxCoeff() < 1e-11);
      RMatrix a2 = solve_R(l, 1, z, q);
      RMatrix b2 = closed_form_R(l, 1, z, q);
      CHECK((a2.m - b2.m).cwiseAbs().maxCoeff() < 1e-11);
    }
  }
}

TEST_CASE("weight-block structure is exact") {
  cx q{0.62, 0.0};
  RMatrix r = solve_R(2, 1, cx(1.9, 0.2), q);
  TensorVector probe({2, 1});
  for (long col = 0; col < probe.dim(); ++col)
    for (long row = 0; row < probe.dim(); ++row)
      if (probe.weight_of(row) != probe.weight_of(col))
        CHECK(std::abs(r.m(row, col)) < 1e-13);
}

TEST_CASE("normalization R(v0 x v0) = v0 x v0") {
  cx q{0.6, 0.0};
  for (long l1 : {1L, 2L})
    for (long l2 : {1L, 2L}) {
      RMatrix r = solve_R(l1, l2, cx(1.4, 0.6), q);
      CHECK(rel(r.m(0, 0), cx(1.0, 0.0)) < 1e-12);
      for (long row = 1; row < r.m.rows(); ++row)
        CHECK(std::abs(r.m(row, 0)) < 1e-12);
    }
}

TEST_CASE("resonant point is detected") {
  cx q{0.6, 0.0};
  // the (1,1) normalizing denominator vanishes at z = q^{-2}
  CHECK_THROWS_AS(solve_R(1, 1, 1.0 / (q * q), q), Error);
}

TEST_CASE("r_tilde conjugation is an involution") {
  cx q{0.57, 0.0};
  RMatrix r = solve_R(1, 2, cx(1.8, 0.1), q);
  RMatrix rt = r_tilde(r_tilde(r));
  CHECK((rt.m - r.m).norm() < 1e-13);
}

TEST_CASE("r_hat at spin (0,0) is the scalar 1") {
  cx q{0.6, 0.0};
  RMatrix rh = r_hat(0, 0, cx(1.3, 0.0), q, kTrunc);
  CHECK(rel(rh.m(0, 0), cx(1.0, 0.0)) < 1e-13);
}

TEST_CASE("Yang-Baxter residuals") {
  Sampler smp(23);
  cx q{0.6, 0.0};
  // one trivial leg makes the residual vanish identically
  CHECK(ybe_residual(0, 1, 1, smp.annulus(0.5, 2.0), smp.annulus(0.5, 2.0), q) < 1e-14);
  for (int trial = 0; trial < 3; ++trial) {
    cx z12 = smp.annulus(0.5, 2.0);
    cx z23 = smp.annulus(0.5, 2.0);
    CHECK(ybe_residual(1, 1, 1, z12, z23, q) < 1e-10);
    CHECK(ybe_residual(1, 2, 1, z12, z23, q) < 1e-10);
  }
}
