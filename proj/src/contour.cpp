#include "qkz/contour.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace qkz {

namespace {

constexpr double kRadiusBand = 1e-8;      // poles must clear the circle by this
constexpr double kPoleCollision = 1e-10;  // two corrected poles this close collide

struct Kahan {
  cx sum{0.0, 0.0};
  cx comp{0.0, 0.0};
  void add(cx v) {
    cx t = sum + v;
    if (std::abs(sum) >= std::abs(v))
      comp += (sum - t) + v;
    else
      comp += (v - t) + sum;
    sum = t;
  }
  cx value() const { return sum + comp; }
};

cx recurse(const ContourIntegrand& f, const ContourSpec& spec, int Q, int var,
           std::vector<cx>& t, DeflationSet& defl) {
  if (var < 0) return f.eval(t, defl);

  const double r = spec.radius[var];
  auto catalog = f.poles(var, t, defl, r);

  // corrections: prescribed-inside poles excluded by the circle and
  // prescribed-outside poles the circle swallowed
  std::vector<PoleSpec> corrections;
  for (const auto& p : catalog) {
    double m = std::abs(p.location);
    if (std::abs(m - r) < kRadiusBand * std::max(1.0, r))
      fail(Error::Kind::Infeasible,
           "integrate: pole sits on the t[" + std::to_string(var) +
               "] circle (|c| = " + std::to_string(m) + ", r = " + std::to_string(r) + ")");
    if (p.orientation > 0 && m > r) corrections.push_back(p);
    if (p.orientation < 0 && m < r) corrections.push_back(p);
  }
  for (size_t i = 0; i < corrections.size(); ++i)
    for (size_t j = i + 1; j < corrections.size(); ++j) {
      double d = std::abs(corrections[i].location - corrections[j].location);
      double s = std::max({std::abs(corrections[i].location),
                           std::abs(corrections[j].location), 1.0});
      if (d < kPoleCollision * s)
        fail(Error::Kind::NonSimplePole,
             "integrate: two catalogued poles collide in variable " +
                 std::to_string(var));
    }

  Kahan acc;
  for (int k = 0; k < Q; ++k) {
    double th = 2.0 * std::numbers::pi * static_cast<double>(k) / Q;
    t[var] = cx(r * std::cos(th), r * std::sin(th));
    acc.add(recurse(f, spec, Q, var - 1, t, defl));
  }
  cx value = acc.value() / static_cast<double>(Q);

  for (const auto& p : corrections) {
    t[var] = p.location;
    defl.push_back(p.tag);
    cx res = recurse(f, spec, Q, var - 1, t, defl) / p.location;
    defl.pop_back();
    value += static_cast<double>(p.orientation) * res;
  }
  return value;
}

}  // namespace

ContourSpec plan_contour(const ModelParams& params, std::span<const cx> z, long N,
                         RadiusPolicy policy, double manual_radius) {
  if (!params.contour_feasible) {
    double pm = std::abs(params.p), qm = std::abs(params.q);
    for (long lj : params.spins) {
      double bound = std::pow(qm, 2.0 * static_cast<double>(lj));
      if (pm >= bound)
        fail(Error::Kind::Infeasible,
             "plan_contour: |p| = " + std::to_string(pm) +
                 " >= |q|^(2l_j) = " + std::to_string(bound) +
                 " for a site of spin " + std::to_string(lj));
    }
  }
  const long n = params.n_sites();
  if (static_cast<long>(z.size()) != n)
    fail(Error::Kind::Domain, "plan_contour: z arity mismatch");

  ContourSpec spec;
  if (N == 0) return spec;

  double pm = std::abs(params.p), qm = std::abs(params.q);

  // sites with l_j = 0 contribute no poles (their factors cancel)
  std::vector<double> inside_base, outside_base;  // s = 0 moduli
  for (long j = 0; j < n; ++j) {
    if (params.spins[j] == 0) continue;
    double lj = static_cast<double>(params.spins[j]);
    inside_base.push_back(std::pow(qm, -lj) * std::abs(z[j]));
    outside_base.push_back(std::pow(qm, lj) * std::abs(z[j]));
  }

  double radius;
  if (policy == RadiusPolicy::Manual) {
    radius = manual_radius;
    if (!(radius > 0.0))
      fail(Error::Kind::Domain, "plan_contour: manual radius must be positive");
    spec.certificate.push_back("manual radius " + std::to_string(radius));
  } else if (inside_base.empty()) {
    radius = 1.0;  // plain torus
    spec.certificate.push_back("no z-side poles; unit torus");
  } else {
    // classic window: every s >= 1 inside pole within the circle, every
    // outside pole beyond it
    double lo = 0.0, hi = std::numeric_limits<double>::infinity();
    for (double b : inside_base) lo = std::max(lo, pm * b);
    for (double b : outside_base) hi = std::min(hi, b);
    if (lo < hi) {
      radius = std::sqrt(lo * hi);
      spec.certificate.push_back("window (" + std::to_string(lo) + ", " +
                                 std::to_string(hi) + "), geometric mean " +
                                 std::to_string(radius));
    } else {
      // shifted-argument case: pole ladders interleave; use the widest
      // pole-free log-gap among all catalogued moduli
      std::vector<double> marks;
      for (double b : inside_base)
        for (double m = b; m > 1e-12; m *= pm) marks.push_back(m);
      for (double b : outside_base)
        for (double m = b; m < 1e12; m /= pm) marks.push_back(m);
      std::sort(marks.begin(), marks.end());
      marks.erase(std::unique(marks.begin(), marks.end()), marks.end());
      double best = 1.0, best_lo = 0.0, best_hi = 0.0;
      for (size_t i = 0; i + 1 < marks.size(); ++i) {
        double gap = marks[i + 1] / marks[i];
        if (gap > best) {
          best = gap;
          best_lo = marks[i];
          best_hi = marks[i + 1];
        }
      }
      if (best < 1.0 + 1e-6)
        fail(Error::Kind::Infeasible,
             "plan_contour: no pole-free annulus separates the ladders");
      radius = std::sqrt(best_lo * best_hi);
      spec.certificate.push_back("interleaved ladders; widest gap (" +
                                 std::to_string(best_lo) + ", " +
                                 std::to_string(best_hi) + "), radius " +
                                 std::to_string(radius));
    }
  }

  // t-t separation: equal radii, needs |q|^2 < 1 < |q|^{-2}
  if (N > 1)
    spec.certificate.push_back("equal radii; |q|^2 = " + std::to_string(qm * qm) +
                               " < r_a/r_b = 1 < " + std::to_string(1.0 / (qm * qm)));

  spec.radius.assign(static_cast<size_t>(N), radius);
  return spec;
}

cx integrate(const ContourIntegrand& f, const ContourSpec& spec,
             const QuadratureGrid& grid) {
  if (grid.Q < 64 || (grid.Q & (grid.Q - 1)) != 0)
    fail(Error::Kind::Domain, "integrate: Q must be a power of two >= 64");
  const int nv = f.dim();
  if (static_cast<int>(spec.radius.size()) != nv)
    fail(Error::Kind::Domain, "integrate: contour/integrand dimension mismatch");
  if (nv == 0) {
    DeflationSet none;
    std::vector<cx> t;
    return f.eval(t, none);
  }
  std::vector<cx> t(nv);
  DeflationSet defl;
  return recurse(f, spec, grid.Q, nv - 1, t, defl);
}

std::vector<ConvergenceRow> convergence_report(const ContourIntegrand& f,
                                               const ContourSpec& spec,
                                               std::span<const int> q_ladder) {
  std::vector<ConvergenceRow> rows;
  cx prev{0.0, 0.0};
  bool first = true;
  for (int Q : q_ladder) {
    QuadratureGrid g{Q};
    cx v = integrate(f, spec, g);
    ConvergenceRow row{Q, v, std::numeric_limits<double>::quiet_NaN()};
    if (!first) row.diff_from_prev = std::abs(v - prev);
    rows.push_back(row);
    prev = v;
    first = false;
  }
  return rows;
}

}  // namespace qkz
