#include "doctest.h"

#include "qkz/contour.hpp"
#include "qkz/sampling.hpp"

using namespace qkz;

namespace {

double rel(cx a, cx b) { return std::abs(a - b) / (std::abs(a) + std::abs(b) + 1e-300); }

// f(t) = prod_a t_a/(t_a - c_a) with declared orientations; deflation in
// variable a drops the (t_a - c_a) denominator, leaving the numerator t_a.
struct SimplePoles : ContourIntegrand {
  std::vector<cx> c;
  std::vector<int> orient;

  int dim() const override { return static_cast<int>(c.size()); }

  cx eval(std::span<const cx> t, const DeflationSet& defl) const override {
    cx v{1.0, 0.0};
    for (int a = 0; a < dim(); ++a) {
      bool deflated = false;
      for (const auto& d : defl)
        if (d.var == a) deflated = true;
      if (deflated)
        v *= t[a];
      else
        v *= t[a] / (t[a] - c[a]);
    }
    return v;
  }

  std::vector<PoleSpec> poles(int var, std::span<const cx>, const DeflationSet&,
                              double) const override {
    return {{c[var], orient[var], Deflation{var, Deflation::Family::ZInside, 0, 0}}};
  }
};

struct ConstantOne : ContourIntegrand {
  int n = 1;
  int dim() const override { return n; }
  cx eval(std::span<const cx>, const DeflationSet&) const override {
    return {1.0, 0.0};
  }
  std::vector<PoleSpec> poles(int, std::span<const cx>, const DeflationSet&,
                              double) const override {
    return {};
  }
};

ContourSpec manual_spec(std::vector<double> radii) {
  ContourSpec s;
  s.radius = std::move(radii);
  return s;
}

}  // namespace

TEST_CASE("normalized measure integrates 1 to 1") {
  ConstantOne f;
  f.n = 2;
  CHECK(rel(integrate(f, manual_spec({0.7, 0.7}), {256}), cx(1.0, 0.0)) < 1e-14);
}

TEST_CASE("single pole: inside prescription with correction equals 1") {
  SimplePoles f;
  f.c = {cx(1.4, 0.3)};
  f.orient = {+1};
  // circle radius 0.5 excludes the must-be-inside pole: correction restores 1
  CHECK(rel(integrate(f, manual_spec({0.5}), {256}), cx(1.0, 0.0)) < 1e-12);
  // pole genuinely inside the circle: no correction needed, same answer
  CHECK(rel(integrate(f, manual_spec({2.0}), {256}), cx(1.0, 0.0)) < 1e-12);
}

TEST_CASE("single pole: outside prescription gives 0") {
  SimplePoles f;
  f.c = {cx(1.4, 0.3)};
  f.orient = {-1};
  CHECK(std::abs(integrate(f, manual_spec({0.5}), {256})) < 1e-12);
  // circle swallowed the pole: the -residue correction cancels it
  CHECK(std::abs(integrate(f, manual_spec({2.0}), {256})) < 1e-12);
}

TEST_CASE("two variables, mixed orientations, radius independence") {
  // inside factor integrates to 1, outside factor to 0; any feasible radii
  // must produce the same iterated value 0
  SimplePoles f;
  f.c = {cx(0.9, 0.2), cx(1.1, -0.4)};
  f.orient = {+1, -1};
  CHECK(std::abs(integrate(f, manual_spec({0.5, 0.5}), {256})) < 1e-12);
  CHECK(std::abs(integrate(f, manual_spec({1.6, 0.5}), {256})) < 1e-12);
  CHECK(std::abs(integrate(f, manual_spec({1.6, 1.6}), {256})) < 1e-12);
}

TEST_CASE("two inside poles, radius independence of the corrected value") {
  SimplePoles f;
  f.c = {cx(0.9, 0.2), cx(1.1, -0.4)};
  f.orient = {+1, +1};
  cx a = integrate(f, manual_spec({0.5, 0.5}), {256});
  cx b = integrate(f, manual_spec({1.6, 0.5}), {256});
  cx c = integrate(f, manual_spec({1.6, 1.6}), {256});
  CHECK(rel(a, cx(1.0, 0.0)) < 1e-12);
  CHECK(rel(a, b) < 1e-12);
  CHECK(rel(a, c) < 1e-12);
}

TEST_CASE("pole on the circle is rejected") {
  SimplePoles f;
  f.c = {cx(0.5, 0.0)};
  f.orient = {+1};
  CHECK_THROWS_AS(integrate(f, manual_spec({0.5}), {256}), Error);
}

TEST_CASE("colliding corrected poles are rejected") {
  struct TwoPoles : ContourIntegrand {
    int dim() const override { return 1; }
    cx eval(std::span<const cx> t, const DeflationSet&) const override {
      return t[0];
    }
    std::vector<PoleSpec> poles(int var, std::span<const cx>, const DeflationSet&,
                                double) const override {
      return {{cx(1.3, 0.0), +1, Deflation{var, Deflation::Family::ZInside, 0, 0}},
              {cx(1.3, 1e-12), +1, Deflation{var, Deflation::Family::ZInside, 1, 0}}};
    }
  } f;
  CHECK_THROWS_AS(integrate(f, manual_spec({0.5}), {256}), Error);
}

TEST_CASE("grid validation") {
  ConstantOne f;
  CHECK_THROWS_AS(integrate(f, manual_spec({1.0}), {100}), Error);
  CHECK_THROWS_AS(integrate(f, manual_spec({1.0}), {32}), Error);
}

TEST_CASE("plan_contour on the flagship window") {
  auto params = derive(cx(0.6, 0.0), cx(1.0, 0.0), cx(0.3, 0.0), {1, 1}, 1);
  std::vector<cx> z{cx(1.0, 0.0), cx(0.7, 0.0)};
  ContourSpec spec = plan_contour(params, z, 1);
  REQUIRE(spec.radius.size() == 1);
  // window (0.07776, 0.42), geometric mean
  CHECK(spec.radius[0] > 0.07776);
  CHECK(spec.radius[0] < 0.42);
  CHECK(std::abs(spec.radius[0] - std::sqrt(0.07776 * 0.42)) < 1e-12);
}

TEST_CASE("plan_contour with all spins zero uses the unit torus") {
  auto params = derive(cx(0.6, 0.0), cx(1.0, 0.0), cx(0.3, 0.0), {0, 0}, 1);
  std::vector<cx> z{cx(1.0, 0.0), cx(0.7, 0.0)};
  ContourSpec spec = plan_contour(params, z, 1);
  CHECK(spec.radius[0] == 1.0);
}

TEST_CASE("plan_contour rejects infeasible p") {
  auto params = derive(cx(0.6, 0.0), cx(-1.5, 0.0), cx(0.3, 0.0), {1}, 1);
  std::vector<cx> z{cx(1.0, 0.0)};
  CHECK_THROWS_AS(plan_contour(params, z, 1), Error);
}

TEST_CASE("plan_contour handles interleaved ladders at the shifted point") {
  auto params = derive(cx(0.6, 0.0), cx(1.0, 0.0), cx(0.3, 0.0), {1, 1}, 1);
  std::vector<cx> z{params.p * cx(1.0, 0.0), cx(0.7, 0.0)};  // z_1 -> p z_1
  ContourSpec spec = plan_contour(params, z, 1);
  REQUIRE(spec.radius.size() == 1);
  CHECK(spec.radius[0] > 0.0);
}

TEST_CASE("manual radius policy") {
  auto params = derive(cx(0.6, 0.0), cx(1.0, 0.0), cx(0.3, 0.0), {1, 1}, 1);
  std::vector<cx> z{cx(1.0, 0.0), cx(0.7, 0.0)};
  ContourSpec spec = plan_contour(params, z, 1, RadiusPolicy::Manual, 0.2);
  CHECK(spec.radius[0] == 0.2);
  CHECK_THROWS_AS(plan_contour(params, z, 1, RadiusPolicy::Manual, -1.0), Error);
}

TEST_CASE("convergence report decays for analytic integrands") {
  SimplePoles f;
  f.c = {cx(2.0, 0.0)};
  f.orient = {-1};  // pole stays outside; integrand analytic inside
  std::vector<int> ladder{64, 128, 256};
  auto rows = convergence_report(f, manual_spec({0.5}), ladder);
  REQUIRE(rows.size() == 3);
  CHECK(std::isnan(rows[0].diff_from_prev));
  CHECK(rows[2].diff_from_prev <= rows[1].diff_from_prev + 1e-16);
  // constant integrand: all differences vanish
  ConstantOne one;
  auto rows1 = convergence_report(one, manual_spec({1.0}), ladder);
  CHECK(rows1[1].diff_from_prev == 0.0);
  CHECK(rows1[2].diff_from_prev == 0.0);
}

TEST_CASE("convergence report flags a near-circle pole by slow decay") {
  SimplePoles f;
  f.c = {cx(0.51, 0.0)};
  f.orient = {+1};
  std::vector<int> ladder{64, 128};
  auto rows = convergence_report(f, manual_spec({0.5}), ladder);
  // (0.5/0.51)^Q decay is still visible at these Q
  CHECK(rows[1].diff_from_prev > 1e-8);
}
