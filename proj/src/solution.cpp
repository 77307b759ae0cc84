#include "qkz/solution.hpp"

#include <cmath>

#include "qkz/rmatrix.hpp"

namespace qkz {

cx EllipticW::eval(std::span<const cx> t, std::span<const cx> z,
                   const DeflationSet& defl) const {
  const long N = static_cast<long>(t.size());
  const long n = static_cast<long>(z.size());
  cx value{1.0, 0.0};
  for (long j = 0; j < n; ++j) value *= qpow(z[j], y_exponent);
  for (long a = 0; a < N; ++a)
    for (long j = 0; j < n; ++j)
      value *= theta(theta_base * t[a] / z[j], params.p, trunc).value;
  for (long a = 0; a < N; ++a) {
    for (long j = 0; j < n; ++j) {
      cx arg = qpow(params.q, cx(static_cast<double>(params.spins[j]), 0.0)) *
               t[a] / z[j];
      long m = -1;
      for (const auto& d : defl)
        if (d.family == Deflation::Family::ZInside && d.var == a &&
            d.partner == static_cast<int>(j))
          m = d.s;
      value /= m < 0 ? theta(arg, params.p, trunc).value
                     : theta_deflated(arg, params.p, trunc, m).value;
    }
  }
  cx qm2 = 1.0 / (params.q * params.q);
  for (long a = 0; a < N; ++a)
    for (long b = a + 1; b < N; ++b) {
      value *= theta(t[a] / t[b], params.p, trunc).value;
      cx arg = qm2 * t[a] / t[b];
      long m = -1;
      for (const auto& d : defl)
        if (d.family == Deflation::Family::TTInside && d.var == a &&
            d.partner == static_cast<int>(b))
          m = d.s;
      value /= m < 0 ? theta(arg, params.p, trunc).value
                     : theta_deflated(arg, params.p, trunc, m).value;
    }
  if (extra) value *= extra(t, z);
  return value;
}

cx EllipticW::declared_t_ratio(long a) const {
  double suml = static_cast<double>(params.sum_spins());
  return params.kappa *
         qpow(params.q, cx(-2.0 * static_cast<double>(params.N) +
                               4.0 * static_cast<double>(a + 1) - 2.0 + suml,
                           0.0));
}

cx EllipticW::declared_z_ratio(long j) const {
  return qpow(params.q, cx(-static_cast<double>(params.spins[j]) *
                               static_cast<double>(params.N),
                           0.0));
}

EllipticW build_W(const ModelParams& params, const TruncationPolicy& trunc) {
  if (params.kappa == cx(0.0, 0.0))
    fail(Error::Kind::Domain, "build_W: kappa must be nonzero");
  EllipticW w;
  w.params = params;
  w.trunc = trunc;
  double n = static_cast<double>(params.n_sites());
  w.theta_base = qpow(params.kappa, cx(-1.0 / n, 0.0));
  if (params.N == 0) {
    w.y_exponent = cx(0.0, 0.0);
  } else {
    w.y_exponent =
        static_cast<double>(params.N) / n * std::log(params.kappa) / std::log(params.p);
  }
  return w;
}

TvIntegrand::TvIntegrand(const ModelParams& params, std::vector<cx> z,
                         WeightIndex idx, const EllipticW* w,
                         TruncationPolicy trunc)
    : params_(params), z_(std::move(z)), idx_(std::move(idx)), w_(w), trunc_(trunc) {
  if (idx_.mode != WeightIndex::Mode::Sum)
    fail(Error::Kind::Domain, "TvIntegrand: index must be in Sum mode");
  if (idx_.N != params_.N)
    fail(Error::Kind::Domain, "TvIntegrand: index N disagrees with params.N");
}

int TvIntegrand::dim() const { return static_cast<int>(params_.N); }

cx TvIntegrand::eval(std::span<const cx> t, const DeflationSet& defl) const {
  cx jac{1.0, 0.0};
  for (const auto& d : defl) {
    switch (d.family) {
      case Deflation::Family::ZInside:
        if (d.s > 0)
          jac *= qpow(params_.p, cx(static_cast<double>(d.s), 0.0)) *
                 qpow(params_.q, cx(-static_cast<double>(params_.spins[d.partner]), 0.0)) *
                 z_[d.partner];
        break;
      case Deflation::Family::TTInside:
        if (d.s == 0)
          jac *= params_.q * params_.q;
        else
          jac *= qpow(params_.p, cx(static_cast<double>(d.s), 0.0)) * params_.q *
                 params_.q * t[d.partner];
        break;
      case Deflation::Family::ZOutside:
        jac *= -qpow(params_.p, cx(static_cast<double>(-d.s), 0.0)) *
               qpow(params_.q, cx(static_cast<double>(params_.spins[d.partner]), 0.0)) *
               z_[d.partner];
        break;
      case Deflation::Family::TTOutside:
        jac *= -qpow(params_.p, cx(static_cast<double>(-d.s), 0.0)) /
               (params_.q * params_.q) * t[d.partner];
        break;
    }
  }
  cx phi = phase_phi(t, z_, params_, trunc_, defl).value;
  cx w = weight_w_deflated(idx_, t, z_, params_.q, defl);
  if (w == cx(0.0, 0.0)) return {0.0, 0.0};
  cx wf = w_->eval(t, z_, defl);
  return jac * phi * w * wf;
}

std::vector<PoleSpec> TvIntegrand::poles(int var, std::span<const cx> t,
                                         const DeflationSet& defl,
                                         double radius) const {
  (void)defl;
  std::vector<PoleSpec> out;
  const double lo = radius * 0.5, hi = radius * 2.0;
  auto push_ladder = [&](cx base, Deflation::Family fam, int partner, bool inside) {
    // inside ladders: base * p^s (s >= 0) must all be enclosed;
    // outside ladders: base * p^{-s} must all stay out
    cx loc = base;
    for (long s = 0; s < 1000; ++s) {
      double m = std::abs(loc);
      if (inside) {
        if (m < lo) break;
        out.push_back({loc, +1, Deflation{var, fam, partner, s}});
        loc *= params_.p;
      } else {
        if (m > hi) break;
        out.push_back({loc, -1, Deflation{var, fam, partner, s}});
        loc /= params_.p;
      }
    }
  };
  const cx q = params_.q;
  for (long j = 0; j < params_.n_sites(); ++j) {
    if (params_.spins[j] == 0) continue;  // factors cancel, no poles
    cx ql = qpow(q, cx(static_cast<double>(params_.spins[j]), 0.0));
    push_ladder(z_[j] / ql, Deflation::Family::ZInside, static_cast<int>(j), true);
    push_ladder(ql * z_[j], Deflation::Family::ZOutside, static_cast<int>(j), false);
  }
  for (int b = var + 1; b < dim(); ++b) {
    push_ladder(q * q * t[b], Deflation::Family::TTInside, b, true);
    push_ladder(t[b] / (q * q), Deflation::Family::TTOutside, b, false);
  }
  return out;
}

TensorVector psi(const ModelParams& params, std::span<const cx> z,
                 const EllipticW& w, const QuadratureGrid& grid,
                 const TruncationPolicy& trunc) {
  TensorVector out(params.spins);
  SeriesValue pref = solution_prefactor(z, params, trunc);
  ContourSpec spec = plan_contour(params, z, params.N);

  for (long flat = 0; flat < out.dim(); ++flat) {
    auto eps = out.multi_index(flat);
    long deficit = 0;
    for (size_t i = 0; i < eps.size(); ++i) deficit += params.spins[i] - eps[i];
    if (deficit != params.N) continue;  // exactly zero by the weight condition
    std::vector<long> cnu(eps.size());
    for (size_t i = 0; i < eps.size(); ++i) cnu[i] = params.spins[i] - eps[i];
    WeightIndex idx = WeightIndex::sum_mode(cnu, params.spins);
    TvIntegrand f(params, std::vector<cx>(z.begin(), z.end()), idx, &w, trunc);
    out.coeffs[flat] = pref.value * integrate(f, spec, grid);
  }
  return out;
}

TensorVector apply_qkz_rhs(long j, std::span<const cx> z,
                           const ModelParams& params,
                           const TruncationPolicy& trunc,
                           const TensorVector& v) {
  const long n = params.n_sites();
  if (j < 0 || j >= n) fail(Error::Kind::Domain, "apply_qkz_rhs: bad site");
  TensorVector cur = v;
  for (long i = j + 1; i < n; ++i) {
    RMatrix rh = r_hat(params.spins[j], params.spins[i], z[j] / z[i], params.q, trunc);
    cur = apply_two_site({j, i, rh.m}, cur);
  }
  {
    long lj = params.spins[j];
    Matrix diag = Matrix::Zero(lj + 1, lj + 1);
    for (long m = 0; m <= lj; ++m)
      diag(m, m) = qpow(params.kappa, cx(static_cast<double>(lj - 2 * m) / 2.0, 0.0));
    cur = apply_one_site(j, diag, cur);
  }
  for (long i = 0; i < j; ++i) {
    RMatrix rh =
        r_hat(params.spins[j], params.spins[i], params.p * z[j] / z[i], params.q, trunc);
    cur = apply_two_site({j, i, rh.m}, cur);
  }
  return cur;
}

double qkz_residual(long j, const ModelParams& params, std::span<const cx> z,
                    const EllipticW& w, const QuadratureGrid& grid,
                    const TruncationPolicy& trunc) {
  TensorVector psi_z = psi(params, z, w, grid, trunc);
  std::vector<cx> zs(z.begin(), z.end());
  zs[j] *= params.p;
  TensorVector psi_shifted = psi(params, zs, w, grid, trunc);
  TensorVector rhs = apply_qkz_rhs(j, z, params, trunc, psi_z);

  double num = 0.0;
  for (long i = 0; i < psi_shifted.dim(); ++i)
    num = std::max(num, std::abs(psi_shifted.coeffs[i] - rhs.coeffs[i]));
  double den = std::max(psi_z.max_norm(), 1e-30);
  return num / den;
}

}  // namespace qkz
