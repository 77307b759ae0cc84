#include "doctest.h"
#include "qkz/params.hpp"
#include "qkz/qspecial.hpp"
#include "qkz/sampling.hpp"

using namespace qkz;

namespace {
double rel(cx a, cx b) { return std::abs(a - b) / (std::abs(a) + std::abs(b) + 1e-300); }
}  // namespace

TEST_CASE("derive computes p, kappa, a_i") {
  auto mp = derive(cx(0.6, 0.0), cx(1.0, 0.0), cx(0.3, 0.0), {1, 1}, 1);
  CHECK(std::abs(mp.p - cx(0.046656, 0.0)) < 1e-15);  // 0.6^6
  // kappa = q^{-2(L + sum l/2 - N + 1)}
  CHECK(rel(mp.kappa, qpow(cx(0.6, 0.0), cx(-2.0 * 1.3, 0.0))) < 1e-14);
  CHECK(mp.contour_feasible);

  // n = 1, l = l, N = 0: kappa = q^{-2(L + l/2 + 1)} and p^{a_1} = kappa^{-l/2}
  for (long l : {1L, 2L, 3L}) {
    auto m1 = derive(cx(0.6, 0.0), cx(2.0, 0.0), cx(0.37, 0.0), {l}, 0);
    cx expect = qpow(m1.q, cx(-2.0 * (0.37 + double(l) / 2.0 + 1.0), 0.0));
    CHECK(rel(m1.kappa, expect) < 1e-14);
    cx lhs = qpow(m1.p, m1.a_exponents[0]);
    cx rhs = qpow(m1.kappa, cx(-double(l) / 2.0, 0.0));
    CHECK(rel(lhs, rhs) < 1e-13);
  }
}

TEST_CASE("derive rejects bad domains") {
  CHECK_THROWS_AS(derive(cx(1.2, 0.0), cx(1.0, 0.0), cx(0.0, 0.0), {1}, 0), Error);
  CHECK_THROWS_AS(derive(cx(0.99, 0.0), cx(-2.1, 0.0), cx(0.0, 0.0), {1}, 0), Error);
  CHECK_THROWS_AS(derive(cx(0.5, 0.0), cx(1.0, 0.0), cx(0.0, 0.0), {}, 0), Error);
  CHECK_THROWS_AS(derive(cx(0.5, 0.0), cx(1.0, 0.0), cx(0.0, 0.0), {-1}, 0), Error);
  CHECK_THROWS_AS(derive(cx(0.5, 0.0), cx(1.0, 0.0), cx(0.0, 0.0), {1}, -1), Error);
}

TEST_CASE("exp-log round trip for p") {
  Sampler smp(31);
  for (int trial = 0; trial < 20; ++trial) {
    cx q = smp.annulus(0.3, 0.9);
    cx k = smp.annulus(0.2, 1.5);
    auto mp = [&]() {
      try {
        return derive(q, k, cx(0.1, 0.0), {1}, 0);
      } catch (const Error&) {
        return derive(cx(0.5, 0.0), cx(1.0, 0.0), cx(0.1, 0.0), {1}, 0);
      }
    }();
    cx again = qpow(mp.q, 2.0 * (mp.k + 2.0));
    CHECK(rel(again, mp.p) < 1e-14);
  }
}

TEST_CASE("delta_weight values and prefactor exponent identity") {
  CHECK(delta_weight(cx(0.0, 0.0), cx(2.0, 0.0)) == cx(0.0, 0.0));
  CHECK(std::abs(delta_weight(cx(-2.0, 0.0), cx(1.0, 0.0))) < 1e-16);
  CHECK(rel(delta_weight(cx(2.0, 0.0), cx(2.0, 0.0)), cx(0.5, 0.0)) < 1e-15);
  CHECK_THROWS_AS(delta_weight(cx(1.0, 0.0), cx(-2.0, 0.0)), Error);

  // Delta_{A + l} - Delta_A = l/(2(k+2)) (A + (l+2)/2) with
  // A = L + sum_{j>i} l_j - 2N, for random parameters
  Sampler smp(55);
  for (int trial = 0; trial < 40; ++trial) {
    cx k = smp.annulus(0.3, 3.0);
    cx L = smp.annulus(0.1, 2.0);
    double l = double(smp.integer(0, 4));
    double tail = double(smp.integer(0, 6));
    double N = double(smp.integer(0, 3));
    cx A = L + tail - 2.0 * N;
    cx lhs = delta_weight(A + l, k) - delta_weight(A, k);
    cx rhs = l / (2.0 * (k + 2.0)) * (A + (l + 2.0) / 2.0);
    CHECK(rel(lhs, rhs) < 1e-12);
  }
}

TEST_CASE("contour feasibility flag") {
  auto good = derive(cx(0.6, 0.0), cx(1.0, 0.0), cx(0.0, 0.0), {1, 1}, 1);
  CHECK(good.contour_feasible);
  // k + 2 = 0.5 < l = 1 makes |p| = |q| > |q|^2
  auto bad = derive(cx(0.6, 0.0), cx(-1.5, 0.0), cx(0.0, 0.0), {1}, 1);
  CHECK(!bad.contour_feasible);
}
