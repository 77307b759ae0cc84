#include "doctest.h"
#include "qkz/qspecial.hpp"
#include "qkz/sampling.hpp"

using namespace qkz;

namespace {
const TruncationPolicy kTrunc{400, 1e-18};
double rel(cx a, cx b) { return std::abs(a - b) / (std::abs(a) + std::abs(b) + 1e-300); }
}  // namespace

TEST_CASE("qint basics") {
  cx q{0.37, 0.21};
  CHECK(qint(0, q) == cx(0.0, 0.0));
  CHECK(qint(1, q) == cx(1.0, 0.0));
  CHECK(rel(qint(2, cx(2.0, 0.0)), cx(2.5, 0.0)) < 1e-15);
  for (long n = 1; n <= 7; ++n)
    CHECK(std::abs(qint(-n, q) + qint(n, q)) < 1e-13 * std::abs(qint(n, q)));
  CHECK_THROWS_AS(qint(2, cx(1.0, 0.0)), Error);
  CHECK_THROWS_AS(qint(2, cx(0.0, 0.0)), Error);
  CHECK_THROWS_AS(qint(2, cx(-1.0, 0.0)), Error);
}

TEST_CASE("qbinom edge values and limits") {
  cx q{0.41, 0.13};
  CHECK(qfact(0, q) == cx(1.0, 0.0));
  CHECK(qbinom(5, 0, q) == cx(1.0, 0.0));
  CHECK(rel(qbinom(2, 1, q), q + 1.0 / q) < 1e-14);
  // symmetry m <-> n-m
  for (long n = 0; n <= 8; ++n)
    for (long m = 0; m <= n; ++m)
      CHECK(rel(qbinom(n, m, q), qbinom(n, n - m, q)) < 1e-12);
  // classical limit
  CHECK(std::abs(qbinom(4, 2, cx(1.0 + 1e-8, 0.0)) - cx(6.0, 0.0)) < 1e-6);
  CHECK_THROWS_AS(qbinom(3, -1, cx(0.5, 0.0)), Error);
  CHECK_THROWS_AS(qbinom(3, 4, cx(0.5, 0.0)), Error);
}

TEST_CASE("q-Pascal recursion") {
  Sampler smp(77);
  for (int trial = 0; trial < 5; ++trial) {
    cx q = smp.annulus(0.2, 0.95);
    for (long n = 1; n <= 12; ++n)
      for (long m = 0; m <= n; ++m) {
        cx lhs = qbinom(n, m, q);
        cx rhs{0.0, 0.0};
        if (m >= 1) rhs += qbinom(n - 1, m - 1, q) * qpow(q, cx(double(n - m), 0));
        if (m <= n - 1) rhs += qbinom(n - 1, m, q) * qpow(q, cx(double(-m), 0));
        CHECK(rel(lhs, rhs) < 1e-12);
      }
  }
}

TEST_CASE("q-binomial theorem") {
  Sampler smp(2024);
  for (int trial = 0; trial < 20; ++trial) {
    cx q = smp.random_q();
    cx x = smp.generic_point();
    long n = smp.integer(1, 9);
    cx lhs{1.0, 0.0};
    for (long i = 1; i <= n; ++i)
      lhs *= 1.0 + qpow(q, cx(double(-n - 1 + 2 * i), 0)) * x;
    cx rhs{0.0, 0.0};
    cx xp{1.0, 0.0};
    for (long i = 0; i <= n; ++i) {
      rhs += qbinom(n, i, q) * xp;
      xp *= x;
    }
    CHECK(rel(lhs, rhs) < 1e-11);
  }
}

TEST_CASE("qpoch values and recursion") {
  CHECK(qpoch(cx(0.0, 0.0), cx(0.5, 0.0), kTrunc).value == cx(1.0, 0.0));
  CHECK(qpoch(cx(0.3, 0.0), cx(0.0, 0.0), kTrunc).value == cx(0.7, 0.0));
  // independent oracle: (0.5; 0.5)_inf, 40-digit product
  CHECK(std::abs(qpoch(cx(0.5, 0.0), cx(0.5, 0.0), kTrunc).value -
                 cx(0.28878809508660242128, 0.0)) < 1e-9);
  CHECK_THROWS_AS(qpoch(cx(0.5, 0.0), cx(1.0, 0.0), kTrunc), Error);

  Sampler smp(4);
  for (int trial = 0; trial < 30; ++trial) {
    cx z = smp.annulus(0.1, 3.0);
    cx a = smp.annulus(0.05, 0.8);
    cx lhs = qpoch(z, a, kTrunc).value;
    cx rhs = (1.0 - z) * qpoch(a * z, a, kTrunc).value;
    CHECK(rel(lhs, rhs) < 1e-13);
  }
}

TEST_CASE("qpoch tail bound is honest") {
  TruncationPolicy rough{12, 1e-30};
  cx z{0.9, 0.0}, a{0.5, 0.0};
  SeriesValue v = qpoch(z, a, rough);
  cx exact = qpoch(z, a, kTrunc).value;
  CHECK(std::abs(v.value - exact) / std::abs(exact) < 3.0 * v.tail_bound);
  CHECK(v.tail_bound > 0.0);
}

TEST_CASE("qpoch2 values and recursion") {
  CHECK(qpoch2(cx(0.0, 0.0), cx(0.2, 0.0), cx(0.5, 0.0), kTrunc).value == cx(1.0, 0.0));
  // a = 0 leaves the single row (z; b)
  cx z{0.4, 0.1};
  CHECK(rel(qpoch2(z, cx(0.0, 0.0), cx(0.5, 0.0), kTrunc).value,
            qpoch(z, cx(0.5, 0.0), kTrunc).value) < 1e-14);
  // independent oracle: (0.3; 0.2, 0.5)_inf
  CHECK(std::abs(qpoch2(cx(0.3, 0.0), cx(0.2, 0.0), cx(0.5, 0.0), kTrunc).value -
                 cx(0.43792827965527160272, 0.0)) < 1e-12);
  // recursion (z; a, b) = (z; b) (az; a, b)
  Sampler smp(9);
  for (int trial = 0; trial < 10; ++trial) {
    cx zz = smp.annulus(0.1, 2.0);
    cx a = smp.annulus(0.05, 0.6);
    cx b = smp.annulus(0.05, 0.6);
    cx lhs = qpoch2(zz, a, b, kTrunc).value;
    cx rhs = qpoch(zz, b, kTrunc).value * qpoch2(a * zz, a, b, kTrunc).value;
    CHECK(rel(lhs, rhs) < 1e-12);
  }
}

TEST_CASE("theta functional equations") {
  cx p{0.046656, 0.0};
  CHECK(std::abs(theta(cx(1.0, 0.0), p, kTrunc).value) < 1e-15);
  CHECK_THROWS_AS(theta(cx(0.0, 0.0), p, kTrunc), Error);

  Sampler smp(11);
  for (int trial = 0; trial < 100; ++trial) {
    cx z = smp.annulus(0.1, 10.0);
    cx tz = theta(z, p, kTrunc).value;
    cx tpz = theta(p * z, p, kTrunc).value;
    CHECK(std::abs(tpz + tz / z) / std::abs(tz) < 1e-12);
    cx tzp = theta(z / p, p, kTrunc).value;
    CHECK(std::abs(tzp + (z / p) * tz) / (std::abs(tzp) + 1e-300) < 1e-12);
  }
}

TEST_CASE("theta_deflated removes exactly the vanishing factor") {
  cx p{0.046656, 0.0};
  Sampler smp(13);
  for (long m : {-2L, -1L, 0L, 1L, 2L}) {
    cx pm = qpow(p, cx(double(m), 0));
    // away from the zero both evaluations agree after multiplying back
    cx z = pm * cx(1.3, 0.4);
    cx factor = m <= 0 ? (1.0 - qpow(p, cx(double(-m), 0)) * z)
                       : (1.0 - qpow(p, cx(double(m), 0)) / z);
    CHECK(rel(theta(z, p, kTrunc).value,
              factor * theta_deflated(z, p, kTrunc, m).value) < 1e-12);
    // at the zero itself the deflated value is finite and nonzero
    cx at = theta_deflated(pm, p, kTrunc, m).value;
    CHECK(std::abs(at) > 1e-8);
  }
}

TEST_CASE("rho degeneracies, limit and oracle value") {
  cx q{0.5, 0.0};
  CHECK(rel(rho(cx(2.0, 0.0), 0, 3, q, kTrunc).value, cx(1.0, 0.0)) < 1e-15);
  // z -> infinity limit is q^{l_i l_j / 2}
  CHECK(rel(rho(cx(1e9, 0.0), 2, 3, q, kTrunc).value, qpow(q, cx(3.0, 0.0))) < 1e-8);
  // independent 40-digit oracle at l_i = l_j = 1, q = 0.5, z = 2
  CHECK(std::abs(rho(cx(2.0, 0.0), 1, 1, q, kTrunc).value -
                 cx(0.4388499944901608456, 0.0)) < 1e-12);
  // crossing consistency under z -> 1/z: rho(z) rho(1/z) = -1 at spin 1
  cx prod = rho(cx(2.0, 0.0), 1, 1, q, kTrunc).value *
            rho(cx(0.5, 0.0), 1, 1, q, kTrunc).value;
  CHECK(std::abs(prod - cx(-1.0, 0.0)) < 1e-12);
}

TEST_CASE("xi degeneracies and oracle value") {
  cx q{0.6, 0.0};
  cx p = qpow(q, cx(6.0, 0.0));
  CHECK(rel(xi(cx(1.4, 0.0), 0, 2, q, p, kTrunc).value, cx(1.0, 0.0)) < 1e-15);
  CHECK(rel(xi(cx(1.4, 0.0), 2, 0, q, p, kTrunc).value, cx(1.0, 0.0)) < 1e-15);
  // independent 40-digit oracle at l_i = l_j = 1, z = 1.4
  CHECK(std::abs(xi(cx(1.4, 0.0), 1, 1, q, p, kTrunc).value -
                 cx(0.98325129691808992379, 0.0)) < 1e-12);
}
