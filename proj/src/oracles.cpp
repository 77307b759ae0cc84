#include "qkz/oracles.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <sstream>

namespace qkz {

namespace {

double rel_residual(cx lhs, cx rhs) {
  return std::abs(lhs - rhs) / (std::abs(lhs) + std::abs(rhs) + 1e-300);
}

cx qp(cx q, cx e) { return qpow(q, e); }
cx qp(cx q, double e) { return qpow(q, cx(e, 0.0)); }

// all sign vectors in {+1,-1}^n, lexicographic with +1 first
void for_each_signs(long n, const std::function<void(const std::vector<int>&)>& fn) {
  std::vector<int> s(n, +1);
  long total = 1L << n;
  for (long mask = 0; mask < total; ++mask) {
    for (long i = 0; i < n; ++i) s[i] = (mask >> i) & 1 ? -1 : +1;
    fn(s);
  }
}

// all maps slots -> {0..N-1}
void for_each_assignment(long slots, long N,
                         const std::function<void(const std::vector<long>&)>& fn) {
  std::vector<long> b(slots, 0);
  while (true) {
    fn(b);
    long i = 0;
    for (; i < slots; ++i) {
      if (++b[i] < N) break;
      b[i] = 0;
    }
    if (i == slots) break;
  }
}

// injective maps slots -> {0..N-1}
void for_each_injection(long slots, long N,
                        const std::function<void(const std::vector<long>&)>& fn) {
  std::vector<long> b(slots);
  std::vector<bool> used(N, false);
  std::function<void(long)> rec = [&](long pos) {
    if (pos == slots) {
      fn(b);
      return;
    }
    for (long v = 0; v < N; ++v) {
      if (used[v]) continue;
      used[v] = true;
      b[pos] = v;
      rec(pos + 1);
      used[v] = false;
    }
  };
  rec(0);
}

}  // namespace

IdentityReport make_report(const std::string& id, const std::string& sample,
                           cx lhs, cx rhs, double tol) {
  IdentityReport r;
  r.id = id;
  r.sample = sample;
  r.lhs = lhs;
  r.rhs = rhs;
  r.tol = tol;
  r.residual = rel_residual(lhs, rhs);
  r.pass = r.residual < tol;
  return r;
}

IdentityReport make_vanishing_report(const std::string& id,
                                     const std::string& sample, cx lhs,
                                     double max_term, double tol) {
  IdentityReport r;
  r.id = id;
  r.sample = sample;
  r.lhs = lhs;
  r.rhs = cx(0.0, 0.0);
  r.tol = tol;
  double scale = std::max(max_term, 1.0);
  r.residual = std::abs(lhs) / scale;
  r.pass = r.residual < tol;
  r.notes = "vanishing; scale " + std::to_string(scale);
  return r;
}

// --- Lemma 1 ----------------------------------------------------------------

IdentityReport lemma_combi_i(long n, long m, cx q) {
  cx lhs{0.0, 0.0};
  for (long mask = 0; mask < (1L << n); ++mask) {
    if (std::popcount(static_cast<unsigned long>(mask)) != m) continue;
    long cross = 0;
    for (long i = 0; i < n; ++i)
      for (long j = i + 1; j < n; ++j)
        if ((mask >> i & 1) && !(mask >> j & 1)) ++cross;
    lhs += qp(q, 2.0 * static_cast<double>(cross));
  }
  cx rhs = qp(q, static_cast<double>(m * (n - m))) * qbinom(n, m, q);
  std::ostringstream os;
  os << "n=" << n << " m=" << m;
  return make_report("lemma1.i", os.str(), lhs, rhs, 1e-10);
}

IdentityReport lemma_combi_ii(long n, long m, cx q) {
  cx lhs{0.0, 0.0};
  for (long mask = 0; mask < (1L << n); ++mask) {
    if (std::popcount(static_cast<unsigned long>(mask)) != m) continue;
    double expo = 0.0;
    for (long i = 0; i < n; ++i) {
      double mu = (mask >> i & 1) ? 1.0 : -1.0;
      expo += mu * static_cast<double>(n - 1 - i);  // # of j > i
    }
    lhs += qp(q, expo);
  }
  cx rhs = qp(q, static_cast<double>(-n * (n - 1)) / 2.0 +
                     static_cast<double>(m * (n - 1))) *
           qbinom(n, m, q);
  std::ostringstream os;
  os << "n=" << n << " m=" << m;
  return make_report("lemma1.ii", os.str(), lhs, rhs, 1e-10);
}

// --- Lemma 2 ----------------------------------------------------------------

IdentityReport lemma_sym(long n, const std::vector<long>& positions,
                         const std::vector<cx>& t, cx q) {
  long m = static_cast<long>(positions.size());
  if (n > 10) fail(Error::Kind::Domain, "lemma_sym: n too large for n! enumeration");
  cx qm2 = 1.0 / (q * q);

  std::vector<long> perm(n);
  for (long i = 0; i < n; ++i) perm[i] = i;
  cx lhs{0.0, 0.0};
  do {
    // sign of perm
    int sgn = 1;
    for (long a = 0; a < n; ++a)
      for (long b = a + 1; b < n; ++b)
        if (perm[a] > perm[b]) sgn = -sgn;
    cx term = static_cast<double>(sgn);
    for (long j : positions) term *= t[perm[j - 1]];  // positions are 1-based
    for (long a = 0; a < n; ++a)
      for (long b = a + 1; b < n; ++b) term *= t[perm[b]] - qm2 * t[perm[a]];
    lhs += term;
  } while (std::next_permutation(perm.begin(), perm.end()));

  long sum_pos = 0;
  for (long j : positions) sum_pos += j;
  cx rhs = qp(q, static_cast<double>(-m * (n + 1)) -
                     static_cast<double>(n * (n - 1)) / 2.0 +
                     2.0 * static_cast<double>(sum_pos));
  rhs *= qfact(m, q) * qfact(n - m, q);
  // e_m(t)
  std::vector<cx> e(m + 1, cx(0.0, 0.0));
  e[0] = 1.0;
  for (long i = 0; i < n; ++i)
    for (long d = std::min<long>(m, i + 1); d >= 1; --d) e[d] += e[d - 1] * t[i];
  rhs *= e[m];
  for (long a = 0; a < n; ++a)
    for (long b = a + 1; b < n; ++b) rhs *= t[b] - t[a];

  std::ostringstream os;
  os << "n=" << n << " positions=";
  for (long j : positions) os << j << ",";
  return make_report("lemma2", os.str(), lhs, rhs, 1e-9);
}

// --- Lemma 3 ----------------------------------------------------------------

IdentityReport lemma_z(long n, long l, cx z, const std::vector<cx>& t, cx q) {
  if (n < 1 || n > l) fail(Error::Kind::Domain, "lemma_z: need 1 <= n <= l");
  for (long a = 0; a < n; ++a)
    for (long b = a + 1; b < n; ++b)
      if (std::abs(t[a] - t[b]) < 1e-12 * (std::abs(t[a]) + std::abs(t[b])))
        fail(Error::Kind::PoleHit, "lemma_z: coincident t values");
  cx qm2 = 1.0 / (q * q);
  cx ql = qp(q, static_cast<double>(l));

  cx lhs{0.0, 0.0};
  for (long s = 0; s <= n; ++s) {
    cx outer = qp(q, static_cast<double>(-s * (n - 1))) * qbinom(n, s, q);
    if (s % 2) outer = -outer;
    cx inner{0.0, 0.0};
    std::vector<long> perm(n);
    for (long i = 0; i < n; ++i) perm[i] = i;
    do {
      cx term{1.0, 0.0};
      for (long i = 0; i < s; ++i) term *= z - ql * t[perm[i]];
      for (long i = s; i < n; ++i) term *= z - t[perm[i]] / ql;
      for (long a = 0; a < n; ++a)
        for (long b = a + 1; b < n; ++b)
          term *= (t[perm[b]] - qm2 * t[perm[a]]) / (t[perm[b]] - t[perm[a]]);
      inner += term;
    } while (std::next_permutation(perm.begin(), perm.end()));
    lhs += outer * inner;
  }

  cx rhs = qp(q, static_cast<double>(-l * n) - static_cast<double>(n * (n - 1)) / 2.0);
  if (n % 2) rhs = -rhs;
  for (long i = 0; i < n; ++i)
    rhs *= 1.0 - qp(q, 2.0 * static_cast<double>(l - i));
  rhs *= qfact(n, q);
  for (long i = 0; i < n; ++i) rhs *= t[i];

  std::ostringstream os;
  os << "n=" << n << " l=" << l;
  return make_report("lemma3", os.str(), lhs, rhs, 1e-9);
}

// --- slot helpers -----------------------------------------------------------

long SlotSigns::count_minus(long s) const {
  long c = 0;
  for (int v : mu[s])
    if (v < 0) ++c;
  return c;
}

long SlotSigns::total() const {
  long c = 0;
  for (const auto& blk : mu) c += static_cast<long>(blk.size());
  return c;
}

namespace {

struct Slots {
  long r = 0;
  std::vector<long> k;  // 0-based site per block
  std::vector<long> n;  // multiplicities
  std::vector<std::pair<long, long>> flat;  // (block s, 1-based i2), lex order

  explicit Slots(const WeightIndex& idx) {
    if (idx.mode != WeightIndex::Mode::Complement)
      fail(Error::Kind::Domain, "slot structure needs a Complement-mode index");
    r = idx.r;
    k = idx.pos;
    n = idx.mult;
    for (long s = 0; s < r; ++s)
      for (long j = 1; j <= n[s]; ++j) flat.emplace_back(s, j);
  }

  // j < (s, i2)
  bool site_lt_slot(long j, long s, long i2, const std::vector<long>& m) const {
    return j < k[s] || (j == k[s] && m[s] < i2);
  }
  // (s, i2) < j
  bool slot_lt_site(long s, long i2, long j, const std::vector<long>& m) const {
    return j > k[s] || (j == k[s] && m[s] >= i2);
  }
};

}  // namespace

// --- G^ integrand -----------------------------------------------------------

cx ghat_integrand(const WeightIndex& idx, const SlotSigns& mu,
                  const std::vector<long>& m, const std::vector<int>& eps,
                  std::span<const cx> t, std::span<const cx> z,
                  std::span<const cx> u, const ModelParams& params,
                  bool with_t_factor) {
  Slots sl(idx);
  const long nslots = static_cast<long>(sl.flat.size());
  if (static_cast<long>(u.size()) != nslots)
    fail(Error::Kind::Domain, "ghat_integrand: u arity mismatch");
  const long N = static_cast<long>(t.size());
  const long n = static_cast<long>(z.size());
  const cx q = params.q, k = params.k, L = params.L;

  cx value{1.0, 0.0};
  for (long f = 0; f < nslots; ++f) {
    auto [s, i2] = sl.flat[f];
    double mf = static_cast<double>(mu.mu[s][i2 - 1]);
    value *= qpow(q, L * mf);
    for (long j = 0; j < n; ++j) {
      double lj = static_cast<double>(idx.spins[j]);
      if (sl.site_lt_slot(j, s, i2, m)) {
        cx num = z[j] - qp(q, mf * lj - k - 2.0) * u[f];
        cx den = z[j] - qp(q, lj - k - 2.0) * u[f];
        value *= num / den;
      } else if (sl.slot_lt_site(s, i2, j, m)) {
        cx num = u[f] - qp(q, -mf * lj + k + 2.0) * z[j];
        cx den = u[f] - qp(q, lj + k + 2.0) * z[j];
        value *= qp(q, mf * lj) * num / den;
      }
    }
    for (long b = 0; b < N; ++b) {
      cx num = u[f] - qp(q, -mf * (k + 1.0) - static_cast<double>(eps[b])) * t[b];
      cx den = u[f] - qp(q, -mf * (k + 2.0)) * t[b];
      value *= qp(q, -mf) * num / den;
    }
  }
  for (long f1 = 0; f1 < nslots; ++f1)
    for (long f2 = f1 + 1; f2 < nslots; ++f2) {
      auto [s1, i1] = sl.flat[f1];
      auto [s2, i2] = sl.flat[f2];
      double m1 = static_cast<double>(mu.mu[s1][i1 - 1]);
      double m2 = static_cast<double>(mu.mu[s2][i2 - 1]);
      cx num = qp(q, -m1) * u[f1] - qp(q, -m2) * u[f2];
      cx den = u[f1] - u[f2] / (q * q);
      value *= num / den;
    }
  if (with_t_factor) {
    cx qm2 = 1.0 / (q * q);
    for (long a = 0; a < N; ++a)
      for (long b = a + 1; b < N; ++b) {
        cx num = qp(q, static_cast<double>(eps[b])) * t[b] -
                 qp(q, static_cast<double>(eps[a])) * t[a];
        value *= num / (t[b] - qm2 * t[a]);
      }
  }
  return value;
}

// --- Lemma 4 closed form ----------------------------------------------------

cx ihat_closed(const WeightIndex& idx, const SlotSigns& mu,
               const std::vector<long>& m, const std::vector<int>& eps,
               std::span<const cx> t, std::span<const cx> z,
               const ModelParams& params) {
  Slots sl(idx);
  const long N = static_cast<long>(t.size());
  const long n = static_cast<long>(z.size());
  const cx q = params.q, L = params.L;

  double sum_ns_2as = 0.0;
  for (long s = 0; s < sl.r; ++s)
    sum_ns_2as += static_cast<double>(sl.n[s] - 2 * mu.count_minus(s));
  cx pref = qpow(q, (L - static_cast<double>(N)) * sum_ns_2as);

  for (long f = 0; f < static_cast<long>(sl.flat.size()); ++f) {
    auto [s, i2] = sl.flat[f];
    double mf = static_cast<double>(mu.mu[s][i2 - 1]);
    for (long j = 0; j < n; ++j)
      if (sl.slot_lt_site(s, i2, j, m))
        pref *= qp(q, mf * static_cast<double>(idx.spins[j]));
    // q^{-mu_f} per lex-later slot
    long later = static_cast<long>(sl.flat.size()) - 1 - f;
    pref *= qp(q, -mf * static_cast<double>(later));
  }

  // A_s = mu = -1 slots of block s (store original i2, ascending)
  std::vector<std::vector<long>> A(sl.r);
  for (long s = 0; s < sl.r; ++s)
    for (long j = 1; j <= sl.n[s]; ++j)
      if (mu.mu[s][j - 1] < 0) A[s].push_back(j);

  cx prod_qe{1.0, 0.0};
  for (long b = 0; b < N; ++b)
    prod_qe *= qp(q, -1.0 - static_cast<double>(eps[b]));

  cx total{0.0, 0.0};
  // enumerate per-block subsets D_s of A_s via bitmasks
  std::vector<long> dmask(sl.r, 0);
  std::function<void(long)> rec = [&](long s) {
    if (s < sl.r) {
      for (long mask = 0; mask < (1L << A[s].size()); ++mask) {
        dmask[s] = mask;
        rec(s + 1);
      }
      return;
    }
    // flat D-slot list: (block, original i2), lex order
    std::vector<std::pair<long, long>> D;
    long cC = 0;
    for (long s2 = 0; s2 < sl.r; ++s2) {
      for (size_t a = 0; a < A[s2].size(); ++a)
        if (dmask[s2] >> a & 1)
          D.emplace_back(s2, A[s2][a]);
        else
          ++cC;
    }
    // q^2 per (C-element, D-element) pair with C lex-before D
    long cross = 0;
    for (long s2 = 0; s2 < sl.r; ++s2)
      for (size_t a = 0; a < A[s2].size(); ++a) {
        if (dmask[s2] >> a & 1) continue;  // only C elements
        std::pair<long, long> c{s2, A[s2][a]};
        for (const auto& d : D)
          if (c < d) ++cross;
      }
    cx split_pref = qp(q, 2.0 * static_cast<double>(cross));
    for (long i = 0; i < cC; ++i) split_pref *= prod_qe;

    const long nd = static_cast<long>(D.size());
    cx bsum{0.0, 0.0};
    for_each_assignment(nd, N, [&](const std::vector<long>& bv) {
      cx term{1.0, 0.0};
      for (long f = 0; f < nd; ++f) {
        auto [s2, d] = D[f];
        long v = bv[f];
        term *= 1.0 - qp(q, -1.0 - static_cast<double>(eps[v]));
        for (long b = 0; b < N; ++b) {
          if (b == v) continue;
          cx num = t[v] - qp(q, -1.0 - static_cast<double>(eps[b])) * t[b];
          term *= num / (t[v] - t[b]);
        }
        for (long j = 0; j < sl.k[s2]; ++j) {
          double lj = static_cast<double>(idx.spins[j]);
          term *= (z[j] - qp(q, -lj) * t[v]) / (z[j] - qp(q, lj) * t[v]);
        }
        if (d > m[s2]) {
          double lk = static_cast<double>(idx.spins[sl.k[s2]]);
          term *= (z[sl.k[s2]] - qp(q, -lk) * t[v]) /
                  (z[sl.k[s2]] - qp(q, lk) * t[v]);
        }
      }
      for (long f1 = 0; f1 < nd; ++f1)
        for (long f2 = f1 + 1; f2 < nd; ++f2) {
          long v1 = bv[f1], v2 = bv[f2];
          if (v1 == v2) {
            term = cx(0.0, 0.0);
            break;
          }
          term *= (t[v1] - t[v2]) / (t[v1] - t[v2] / (q * q));
        }
      bsum += term;
    });
    total += split_pref * bsum;
  };
  rec(0);
  return pref * total;
}

// --- single-u contour integration for lemma_i_check -------------------------

namespace {

struct LinearFactor {
  cx scale;     // multiplies u in (scale*u + shift); poles come from dens
  cx shift;
};

struct RationalOneVar {
  cx constant{1.0, 0.0};
  std::vector<LinearFactor> num;
  std::vector<LinearFactor> den;
  std::vector<int> den_orientation;  // +1 inside, -1 outside

  cx eval(cx u) const {
    cx v = constant;
    for (const auto& f : num) v *= f.scale * u + f.shift;
    for (const auto& f : den) v /= f.scale * u + f.shift;
    return v;
  }

  cx residue_over_u(size_t i) const {
    cx c = -den[i].shift / den[i].scale;
    cx v = constant / den[i].scale;
    for (const auto& f : num) v *= f.scale * c + f.shift;
    for (size_t j = 0; j < den.size(); ++j)
      if (j != i) v /= den[j].scale * c + den[j].shift;
    return v / c;
  }
};

// integral over the corrected circle with measure du/(2 pi i u)
cx integrate_rational(const RationalOneVar& f, int Q) {
  std::vector<double> moduli;
  for (const auto& d : f.den) moduli.push_back(std::abs(-d.shift / d.scale));
  double r = 1.0;
  if (!moduli.empty()) {
    std::sort(moduli.begin(), moduli.end());
    double best = 4.0;
    r = moduli.front() / 2.0;
    for (size_t i = 0; i + 1 < moduli.size(); ++i) {
      double gap = moduli[i + 1] / moduli[i];
      if (gap > best) {
        best = gap;
        r = std::sqrt(moduli[i] * moduli[i + 1]);
      }
    }
    if (moduli.back() * 2.0 > r && best <= 4.0) r = moduli.back() * 2.0;
  }
  cx acc{0.0, 0.0};
  for (int k = 0; k < Q; ++k) {
    double th = 2.0 * std::numbers::pi * k / Q;
    acc += f.eval(cx(r * std::cos(th), r * std::sin(th)));
  }
  cx value = acc / static_cast<double>(Q);
  for (size_t i = 0; i < f.den.size(); ++i) {
    cx c = -f.den[i].shift / f.den[i].scale;
    double m = std::abs(c);
    if (std::abs(m - r) < 1e-9 * std::max(1.0, r))
      fail(Error::Kind::Infeasible, "lemma_i_check: pole on the u circle");
    if (f.den_orientation[i] > 0 && m > r) value += f.residue_over_u(i);
    if (f.den_orientation[i] < 0 && m < r) value -= f.residue_over_u(i);
  }
  return value;
}

}  // namespace

IdentityReport lemma_i_check(const WeightIndex& idx, const SlotSigns& mu,
                             const std::vector<long>& m,
                             const std::vector<int>& eps,
                             std::span<const cx> t, std::span<const cx> z,
                             const ModelParams& params, int Q) {
  Slots sl(idx);
  if (sl.flat.size() != 1)
    fail(Error::Kind::Domain, "lemma_i_check: needs r = 1, n_1 = 1");
  const long N = static_cast<long>(t.size());
  if (N > 2) fail(Error::Kind::Domain, "lemma_i_check: N <= 2 only");
  const long n = static_cast<long>(z.size());
  const cx q = params.q, k = params.k, L = params.L;
  const long s = 0, i2 = 1;
  double mf = static_cast<double>(mu.mu[0][0]);

  RationalOneVar f;
  f.constant = qpow(q, L * mf);
  for (long j = 0; j < n; ++j) {
    double lj = static_cast<double>(idx.spins[j]);
    if (sl.site_lt_slot(j, s, i2, m)) {
      // (z_j - q^{mu l_j - k - 2} u) / (z_j - q^{l_j - k - 2} u), pole outside
      f.num.push_back({-qp(q, mf * lj - k - 2.0), z[j]});
      f.den.push_back({-qp(q, lj - k - 2.0), z[j]});
      f.den_orientation.push_back(-1);
    } else if (sl.slot_lt_site(s, i2, j, m)) {
      f.constant *= qp(q, mf * lj);
      f.num.push_back({cx(1.0, 0.0), -qp(q, -mf * lj + k + 2.0) * z[j]});
      f.den.push_back({cx(1.0, 0.0), -qp(q, lj + k + 2.0) * z[j]});
      f.den_orientation.push_back(+1);
    }
  }
  for (long b = 0; b < N; ++b) {
    f.constant *= qp(q, -mf);
    f.num.push_back({cx(1.0, 0.0),
                     -qp(q, -mf * (k + 1.0) - static_cast<double>(eps[b])) * t[b]});
    f.den.push_back({cx(1.0, 0.0), -qp(q, -mf * (k + 2.0)) * t[b]});
    f.den_orientation.push_back(+1);
  }

  cx lhs = integrate_rational(f, Q);
  cx rhs = ihat_closed(idx, mu, m, eps, t, z, params);
  std::ostringstream os;
  os << "mu=" << (mf > 0 ? "+" : "-") << " m1=" << m[0] << " N=" << N << " eps=";
  for (int e : eps) os << (e > 0 ? "+" : "-");
  return make_report("lemma4.ihat", os.str(), lhs, rhs, 1e-8);
}

// --- J^ closed form and definition route ------------------------------------

cx jhat_closed(const WeightIndex& idx, const std::vector<long>& a,
               const std::vector<int>& eps, std::span<const cx> t,
               std::span<const cx> z, const ModelParams& params) {
  Slots sl(idx);
  const long N = static_cast<long>(t.size());
  const cx q = params.q, L = params.L;
  long alpha = 0;
  for (long v : a) alpha += v;

  cx pref = alpha % 2 ? cx(-1.0, 0.0) : cx(1.0, 0.0);
  for (long s = 0; s < sl.r; ++s) {
    double ns2as = static_cast<double>(sl.n[s] - 2 * a[s]);
    double ltail = 0.0;
    for (long j = sl.k[s] + 1; j < idx.n_sites(); ++j)
      ltail += static_cast<double>(idx.spins[j]);
    pref *= qp(q, ltail * ns2as);
    pref *= qpow(q, (L - static_cast<double>(N)) * ns2as);
    double ntail = 0.0;
    for (long u = s + 1; u < sl.r; ++u) ntail += static_cast<double>(sl.n[u]);
    pref *= qp(q, -ns2as * ntail);
  }

  // flat residue slots: (block s, slot index 1..a_s)
  std::vector<long> slot_block;
  for (long s = 0; s < sl.r; ++s)
    for (long j = 0; j < a[s]; ++j) slot_block.push_back(s);
  const long nslots = static_cast<long>(slot_block.size());

  // per-block constant sum over i
  std::vector<cx> isum(sl.r, cx(0.0, 0.0));
  for (long s = 0; s < sl.r; ++s) {
    double lk = static_cast<double>(idx.spins[sl.k[s]]);
    for (long i = 0; i <= sl.n[s] - a[s]; ++i) {
      cx term = qp(q, static_cast<double>(i) *
                          (2.0 * lk - static_cast<double>(sl.n[s] + a[s]) + 1.0));
      term /= qfact(i, q) * qfact(sl.n[s] - a[s] - i, q);
      if (i % 2) term = -term;
      isum[s] += term;
    }
  }

  cx total{0.0, 0.0};
  for_each_injection(nslots, N, [&](const std::vector<long>& bv) {
    // cross-block pair factor
    cx cross{1.0, 0.0};
    for (long f1 = 0; f1 < nslots; ++f1)
      for (long f2 = f1 + 1; f2 < nslots; ++f2) {
        if (slot_block[f1] == slot_block[f2]) continue;
        cross *= (t[bv[f1]] - t[bv[f2]]) / (t[bv[f1]] - t[bv[f2]] / (q * q));
      }

    cx blocks{1.0, 0.0};
    long off = 0;
    for (long s = 0; s < sl.r; ++s) {
      const long as = a[s];
      double ns = static_cast<double>(sl.n[s]);
      double lk = static_cast<double>(idx.spins[sl.k[s]]);
      // factors independent of sigma
      cx common{1.0, 0.0};
      for (long j2 = 0; j2 < as; ++j2) {
        long v = bv[off + j2];
        common *= 1.0 - qp(q, -1.0 - static_cast<double>(eps[v]));
        for (long b = 0; b < N; ++b) {
          if (b == v) continue;
          common *= (t[v] - qp(q, -1.0 - static_cast<double>(eps[b])) * t[b]) /
                    (t[v] - t[b]);
        }
        for (long j = 0; j < sl.k[s]; ++j) {
          double lj = static_cast<double>(idx.spins[j]);
          common *= (z[j] - qp(q, -lj) * t[v]) / (z[j] - qp(q, lj) * t[v]);
        }
      }
      for (long j2 = 0; j2 < as; ++j2)
        for (long j3 = j2 + 1; j3 < as; ++j3) {
          long v1 = bv[off + j2], v2 = bv[off + j3];
          common *= (t[v1] - t[v2]) / (t[v1] - t[v2] / (q * q));
        }
      // z_k crossing factors for slots sigma+1..a_s
      std::vector<cx> zf(as);
      for (long j2 = 0; j2 < as; ++j2) {
        long v = bv[off + j2];
        zf[j2] = (z[sl.k[s]] - qp(q, -lk) * t[v]) / (z[sl.k[s]] - qp(q, lk) * t[v]);
      }
      cx ssum{0.0, 0.0};
      for (long sg = 0; sg <= as; ++sg) {
        cx term = qp(q, static_cast<double>(as) * (ns - static_cast<double>(sg) - 1.0) +
                            static_cast<double>(sg) - ns * (ns - 1.0) / 2.0);
        term *= qfact(sl.n[s], q) / (qfact(sg, q) * qfact(as - sg, q));
        if (sg % 2) term = -term;
        cx ztail{1.0, 0.0};
        for (long j2 = sg; j2 < as; ++j2) ztail *= zf[j2];
        ssum += term * ztail;
      }
      blocks *= common * isum[s] * ssum;
      off += as;
    }
    total += cross * blocks;
  });
  return pref * total;
}

cx jhat_from_definition(const WeightIndex& idx, const std::vector<long>& a,
                        const std::vector<int>& eps, std::span<const cx> t,
                        std::span<const cx> z, const ModelParams& params) {
  Slots sl(idx);
  const cx q = params.q;

  // enumerate (mu) with |A_{mu,s}| = a_s per block, then the (m) sums
  cx total{0.0, 0.0};
  std::vector<long> minus_mask(sl.r, 0);
  std::function<void(long)> rec_mu = [&](long s) {
    if (s < sl.r) {
      for (long mask = 0; mask < (1L << sl.n[s]); ++mask) {
        if (std::popcount(static_cast<unsigned long>(mask)) != a[s]) continue;
        minus_mask[s] = mask;
        rec_mu(s + 1);
      }
      return;
    }
    SlotSigns mu;
    mu.mu.resize(sl.r);
    cx mu_prod{1.0, 0.0};
    for (long s2 = 0; s2 < sl.r; ++s2) {
      mu.mu[s2].resize(sl.n[s2]);
      for (long j = 0; j < sl.n[s2]; ++j) {
        mu.mu[s2][j] = (minus_mask[s2] >> j & 1) ? -1 : +1;
        if (mu.mu[s2][j] < 0) mu_prod = -mu_prod;
      }
    }
    // (m) sums with the binomial weights
    std::vector<long> m(sl.r, 0);
    while (true) {
      cx w{1.0, 0.0};
      long msum = 0;
      for (long s2 = 0; s2 < sl.r; ++s2) {
        msum += m[s2];
        double lk = static_cast<double>(idx.spins[sl.k[s2]]);
        w *= qp(q, static_cast<double>(m[s2]) * lk -
                       static_cast<double>(m[s2] * (sl.n[s2] - 1)));
        w *= qbinom(sl.n[s2], m[s2], q);
      }
      if (msum % 2) w = -w;
      total += w * mu_prod * ihat_closed(idx, mu, m, eps, t, z, params);
      long i = 0;
      for (; i < sl.r; ++i) {
        if (++m[i] <= sl.n[i]) break;
        m[i] = 0;
      }
      if (i == sl.r) break;
    }
  };
  rec_mu(0);
  return total;
}

IdentityReport jhat_prop_check(const WeightIndex& idx, const std::vector<long>& a,
                               const std::vector<int>& eps,
                               std::span<const cx> t, std::span<const cx> z,
                               const ModelParams& params) {
  if (static_cast<long>(t.size()) > 4)
    fail(Error::Kind::Domain, "jhat_prop_check: refusing N > 4");
  cx lhs = jhat_closed(idx, a, eps, t, z, params);
  cx rhs = jhat_from_definition(idx, a, eps, t, z, params);
  std::ostringstream os;
  os << "a=";
  for (long v : a) os << v << ",";
  os << " eps=";
  for (int e : eps) os << (e > 0 ? "+" : "-");
  return make_report("jhat.prop", os.str(), lhs, rhs, 1e-8);
}

// --- Eq. (mod) ---------------------------------------------------------------

IdentityReport eps_sum_identity(const std::vector<long>& b_slots, long N, cx q,
                                std::span<const cx> t) {
  if (N > 5) fail(Error::Kind::Domain, "eps_sum_identity: N <= 5 only");
  for (size_t i = 0; i < b_slots.size(); ++i)
    for (size_t j = i + 1; j < b_slots.size(); ++j)
      if (b_slots[i] == b_slots[j])
        fail(Error::Kind::Domain, "eps_sum_identity: repeated b indices");
  const long alpha = static_cast<long>(b_slots.size());

  cx lhs{0.0, 0.0};
  double max_term = 0.0;
  for_each_signs(N, [&](const std::vector<int>& eps) {
    cx term{1.0, 0.0};
    for (int e : eps) term *= static_cast<double>(e);
    for (long a = 0; a < N; ++a)
      for (long b = a + 1; b < N; ++b)
        term *= qp(q, static_cast<double>(eps[b])) * t[b] -
                qp(q, static_cast<double>(eps[a])) * t[a];
    for (long v : b_slots) {
      term *= 1.0 - qp(q, -1.0 - static_cast<double>(eps[v]));
      for (long b = 0; b < N; ++b) {
        if (b == v) continue;
        term *= t[v] - qp(q, -1.0 - static_cast<double>(eps[b])) * t[b];
      }
    }
    lhs += term;
    max_term = std::max(max_term, std::abs(term));
  });

  std::ostringstream os;
  os << "N=" << N << " alpha=" << alpha;
  if (alpha < N)
    return make_vanishing_report("eq.mod.vanishing", os.str(), lhs, max_term, 1e-8);

  cx rhs = qp(q, static_cast<double>(N * (N - 1)) / 2.0);
  cx f = 1.0 - 1.0 / (q * q);
  for (long i = 0; i < N; ++i) rhs *= f;
  for (long a = 0; a < N; ++a)
    for (long b = a + 1; b < N; ++b) rhs *= t[b] - t[a];
  for (long v : b_slots)
    for (long b = 0; b < N; ++b) {
      if (b == v) continue;
      rhs *= t[v] - t[b] / (q * q);
    }
  return make_report("eq.mod.closed", os.str(), lhs, rhs, 1e-10);
}

// --- Proposition 2 -----------------------------------------------------------

cx j_of_a(const WeightIndex& idx, const std::vector<long>& a,
          std::span<const cx> t, std::span<const cx> z,
          const ModelParams& params, double* max_term) {
  const long N = static_cast<long>(t.size());
  const cx q = params.q;
  cx qm2 = 1.0 / (q * q);
  cx total{0.0, 0.0};
  double mt = 0.0;
  for_each_signs(N, [&](const std::vector<int>& eps) {
    cx term{1.0, 0.0};
    for (int e : eps) term *= static_cast<double>(e);
    for (long x = 0; x < N; ++x)
      for (long y = x + 1; y < N; ++y) {
        cx num = qp(q, static_cast<double>(eps[y])) * t[y] -
                 qp(q, static_cast<double>(eps[x])) * t[x];
        term *= num / (t[y] - qm2 * t[x]);
      }
    term *= jhat_closed(idx, a, eps, t, z, params);
    total += term;
    mt = std::max(mt, std::abs(term));
  });
  if (max_term) *max_term = mt;
  return total;
}

std::vector<IdentityReport> mainprop_vanishing(const WeightIndex& idx,
                                               std::span<const cx> t,
                                               std::span<const cx> z,
                                               const ModelParams& params) {
  Slots sl(idx);
  if (idx.N > 3) fail(Error::Kind::Domain, "mainprop: N <= 3 only");
  std::vector<IdentityReport> out;
  std::vector<long> a(sl.r, 0);
  while (true) {
    bool is_n = true;
    for (long s = 0; s < sl.r; ++s)
      if (a[s] != sl.n[s]) is_n = false;
    if (!is_n) {
      double mt = 0.0;
      cx j = j_of_a(idx, a, t, z, params, &mt);
      std::ostringstream os;
      os << "nu=";
      for (long v : idx.nu) os << v << ",";
      os << " a=";
      for (long v : a) os << v << ",";
      out.push_back(make_vanishing_report("prop2.vanishing", os.str(), j, mt, 1e-8));
    }
    long i = 0;
    for (; i < sl.r; ++i) {
      if (++a[i] <= sl.n[i]) break;
      a[i] = 0;
    }
    if (i == sl.r) break;
  }
  return out;
}

IdentityReport mainprop_closed_form(const WeightIndex& idx, std::span<const cx> t,
                                    std::span<const cx> z,
                                    const ModelParams& params) {
  Slots sl(idx);
  const long N = idx.N;
  const cx q = params.q, L = params.L;
  cx j = j_of_a(idx, sl.n, t, z, params, nullptr);

  cx c = qpow(q, static_cast<double>(N) * (static_cast<double>(N) - L) +
                     cx(static_cast<double>(N * (N - 1)) / 2.0 -
                            static_cast<double>(params.sum_spins() * N),
                        0.0));
  if (N % 2) c = -c;
  cx f = 1.0 - 1.0 / (q * q);
  for (long i = 0; i < N; ++i) c *= f;
  for (long s = 0; s < sl.r; ++s) {
    double ns = static_cast<double>(sl.n[s]);
    double ntail = 0.0;
    for (long u = s + 1; u < sl.r; ++u) ntail += static_cast<double>(sl.n[u]);
    double lk = static_cast<double>(idx.spins[sl.k[s]]);
    c *= qp(q, ntail * ns - lk * ns);
    c *= qfact(sl.n[s], q);
    for (long i = 0; i < sl.n[s]; ++i)
      c *= 1.0 - qp(q, 2.0 * (lk - static_cast<double>(i)));
  }
  cx w = weight_w(idx.complement(), t, z, q);
  cx rhs = c * w;

  std::ostringstream os;
  os << "nu=";
  for (long v : idx.nu) os << v << ",";
  auto rep = make_report("prop2.closed", os.str(), j, rhs, 1e-8);

  // ratio constancy at deterministic perturbations of (t, z)
  std::vector<cx> t2(t.begin(), t.end()), z2(z.begin(), z.end());
  for (auto& v : t2) v *= cx(1.07, 0.11);
  for (auto& v : z2) v *= cx(0.93, -0.05);
  cx j2 = j_of_a(idx, sl.n, t2, z2, params, nullptr);
  cx w2 = weight_w(idx.complement(), t2, z2, q);
  cx ratio1 = j / w, ratio2 = j2 / w2;
  double ratio_dev = rel_residual(ratio1, ratio2);
  std::ostringstream ns;
  ns << "ratio constancy dev " << ratio_dev;
  rep.notes = ns.str();
  if (ratio_dev > 1e-9) rep.pass = false;
  return rep;
}

IdentityReport eq_a_n_check(const WeightIndex& idx, std::span<const cx> t,
                            std::span<const cx> z, const ModelParams& params) {
  Slots sl(idx);
  const long N = idx.N;
  const cx q = params.q, L = params.L;
  cx qm2 = 1.0 / (q * q);
  cx lhs = j_of_a(idx, sl.n, t, z, params, nullptr);

  cx c1 = qpow(q, static_cast<double>(N * N) - L * static_cast<double>(N) +
                      cx(static_cast<double>(N * (N - 1)) / 2.0, 0.0));
  if (N % 2) c1 = -c1;
  cx f = 1.0 - 1.0 / (q * q);
  for (long i = 0; i < N; ++i) c1 *= f;
  for (long s = 0; s < sl.r; ++s) {
    double ns = static_cast<double>(sl.n[s]);
    c1 *= qp(q, ns * (ns - 1.0) / 2.0);
    double ltail = 0.0;
    for (long j = sl.k[s] + 1; j < idx.n_sites(); ++j)
      ltail += static_cast<double>(idx.spins[j]);
    c1 *= qp(q, -ltail * ns);
    double ntail = 0.0;
    for (long u = s + 1; u < sl.r; ++u) ntail += static_cast<double>(sl.n[u]);
    c1 *= qp(q, ntail * ns);
  }

  cx pair_pref{1.0, 0.0};
  for (long x = 0; x < N; ++x)
    for (long y = x + 1; y < N; ++y)
      pair_pref *= (t[y] - t[x]) / (t[y] - qm2 * t[x]);

  cx sum{0.0, 0.0};
  for_each_partition(sl.n, [&](const std::vector<int>& block) {
    // members per block
    std::vector<std::vector<long>> gam(sl.r);
    for (long pos = 0; pos < N; ++pos) gam[block[pos]].push_back(pos);
    // per-block bijections slot -> member, realized as permutations
    std::vector<std::vector<long>> perm(sl.r);
    for (long s = 0; s < sl.r; ++s) perm[s] = gam[s];
    std::function<void(long, cx)> rec = [&](long s, cx acc) {
      if (s == sl.r) {
        // cross-block factor over slot pairs with block i1 > block j1
        cx cross{1.0, 0.0};
        for (long s1 = 0; s1 < sl.r; ++s1)
          for (long s2 = 0; s2 < s1; ++s2)
            for (long v1 : perm[s1])
              for (long v2 : perm[s2])
                cross *= (t[v1] - qm2 * t[v2]) / (t[v1] - t[v2]);
        sum += acc * cross;
        return;
      }
      std::vector<long> p = gam[s];
      std::sort(p.begin(), p.end());
      do {
        perm[s] = p;
        double lk = static_cast<double>(idx.spins[sl.k[s]]);
        cx qlk = qp(q, lk);
        long ns = sl.n[s];
        cx blk{0.0, 0.0};
        for (long sg = 0; sg <= ns; ++sg) {
          cx term = qp(q, -static_cast<double>((ns - 1) * sg)) * qbinom(ns, sg, q);
          if (sg % 2) term = -term;
          for (long i2 = 0; i2 < sg; ++i2) term *= z[sl.k[s]] - qlk * t[p[i2]];
          for (long i2 = sg; i2 < ns; ++i2)
            term *= z[sl.k[s]] - t[p[i2]] / qlk;
          blk += term;
        }
        cx rest{1.0, 0.0};
        for (long i2 = 0; i2 < ns; ++i2)
          for (long j2 = 0; j2 < i2; ++j2)
            rest *= (t[p[i2]] - qm2 * t[p[j2]]) / (t[p[i2]] - t[p[j2]]);
        for (long i2 = 0; i2 < ns; ++i2) {
          rest /= z[sl.k[s]] - qlk * t[p[i2]];
          for (long j = 0; j < sl.k[s]; ++j) {
            double lj = static_cast<double>(idx.spins[j]);
            rest *= (z[j] - qp(q, -lj) * t[p[i2]]) / (z[j] - qp(q, lj) * t[p[i2]]);
          }
        }
        rec(s + 1, acc * blk * rest);
      } while (std::next_permutation(p.begin(), p.end()));
    };
    rec(0, cx(1.0, 0.0));
  });

  cx rhs = c1 * pair_pref * sum;
  std::ostringstream os;
  os << "nu=";
  for (long v : idx.nu) os << v << ",";
  return make_report("eq.a=n", os.str(), lhs, rhs, 1e-8);
}

cx w_proof_conversion(const WeightIndex& sum_mode_idx, cx q) {
  if (sum_mode_idx.mode != WeightIndex::Mode::Sum)
    fail(Error::Kind::Domain, "w_proof_conversion: Sum-mode index expected");
  double expo = 0.0;
  for (long s = 0; s < sum_mode_idx.r; ++s) {
    double lsum = 0.0;
    for (long j = 0; j <= sum_mode_idx.pos[s]; ++j)
      lsum += static_cast<double>(sum_mode_idx.spins[j]);
    expo -= static_cast<double>(sum_mode_idx.mult[s]) * lsum;
  }
  cx conv = qp(q, expo);
  if (sum_mode_idx.N % 2) conv = -conv;
  return conv;
}

cx f_nu(const WeightIndex& idx, std::span<const cx> t, std::span<const cx> z,
        const ModelParams& params, const TruncationPolicy& trunc) {
  if (idx.mode != WeightIndex::Mode::Complement)
    fail(Error::Kind::Domain, "f_nu: Complement-mode index expected");
  const long n = idx.n_sites();
  const long N = idx.N;
  const cx q = params.q, k = params.k, L = params.L;
  cx qk = qpow(q, k);
  cx value{1.0, 0.0};
  for (long i = 0; i < n; ++i)
    for (long j = i + 1; j < n; ++j) {
      cx e = static_cast<double>(idx.spins[i] * idx.spins[j]) / (2.0 * (k + 2.0));
      value *= qpow(qk * z[i], e);
      value *= xi(z[i] / z[j], idx.spins[i], idx.spins[j], q, params.p, trunc).value;
    }
  for (long i = 0; i < n; ++i) {
    cx e = -static_cast<double>(N * idx.spins[i]) / (k + 2.0);
    value *= qpow(qk * z[i], e);
    cx e2 = L * static_cast<double>(idx.spins[i]) / (2.0 * (k + 2.0));
    value *= qpow(qk * z[i], e2);
  }
  cx qm2 = 1.0 / (q * q);
  for (long a = 0; a < N; ++a) value *= qpow(qm2 * t[a], -L / (k + 2.0));
  for (long a = 0; a < N; ++a)
    for (long b = a + 1; b < N; ++b) value *= qpow(qm2 * t[b], 2.0 / (k + 2.0));
  return value;
}

IdentityReport theorem_f_cross_check(const WeightIndex& idx,
                                     std::span<const cx> t,
                                     std::span<const cx> z,
                                     const ModelParams& params,
                                     const TruncationPolicy& trunc) {
  Slots sl(idx);
  const long N = idx.N;
  const cx q = params.q;

  cx lhs = theorem_F(idx, t, z, params, trunc).value;

  // sum over every (a); the non-(n) terms vanish by Proposition 2
  cx jsum{0.0, 0.0};
  std::vector<long> a(sl.r, 0);
  if (sl.r == 0) {
    jsum = cx(1.0, 0.0);  // empty epsilon sum with empty products
  } else {
    while (true) {
      jsum += j_of_a(idx, a, t, z, params, nullptr);
      long i = 0;
      for (; i < sl.r; ++i) {
        if (++a[i] <= sl.n[i]) break;
        a[i] = 0;
      }
      if (i == sl.r) break;
    }
  }

  cx rhs = f_nu(idx, t, z, params, trunc) *
           phase_phi(t, z, params, trunc).value * jsum;
  rhs *= qpow(1.0 / (q - 1.0 / q), cx(2.0 * static_cast<double>(N), 0.0));
  if (N % 2) rhs = -rhs;
  for (long s = 0; s < sl.r; ++s) rhs /= qfact(sl.n[s], q);
  for (long b = 0; b < N; ++b) rhs /= t[b];

  std::ostringstream os;
  os << "nu=";
  for (long v : idx.nu) os << v << ",";
  return make_report("theorem.f", os.str(), lhs, rhs, 1e-8);
}

}  // namespace qkz
