#include "qkz/weight.hpp"

#include <algorithm>
#include <cmath>

namespace qkz {

namespace {

// Neumaier-compensated complex accumulator; partition sums must not depend
// on enumeration order beyond 1e-13.
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

void check_den(cx den, double scale, const char* what) {
  if (std::abs(den) < 1e-12 * scale)
    fail(Error::Kind::PoleHit, std::string("weight_w: evaluation on a pole of ") + what);
}

}  // namespace

WeightIndex WeightIndex::sum_mode(std::vector<long> nu, std::vector<long> spins) {
  if (nu.size() != spins.size())
    fail(Error::Kind::Domain, "WeightIndex: nu/spins arity mismatch");
  WeightIndex idx;
  idx.mode = Mode::Sum;
  idx.nu = std::move(nu);
  idx.spins = std::move(spins);
  long total = 0;
  for (size_t i = 0; i < idx.nu.size(); ++i) {
    if (idx.nu[i] < 0 || idx.nu[i] > idx.spins[i])
      fail(Error::Kind::Domain, "WeightIndex: need 0 <= nu_i <= l_i");
    total += idx.nu[i];
    if (idx.nu[i] != 0) {
      idx.pos.push_back(static_cast<long>(i));
      idx.mult.push_back(idx.nu[i]);
    }
  }
  idx.N = total;
  idx.r = static_cast<long>(idx.pos.size());
  return idx;
}

WeightIndex WeightIndex::complement_mode(std::vector<long> nu, std::vector<long> spins) {
  if (nu.size() != spins.size())
    fail(Error::Kind::Domain, "WeightIndex: nu/spins arity mismatch");
  WeightIndex idx;
  idx.mode = Mode::Complement;
  idx.nu = std::move(nu);
  idx.spins = std::move(spins);
  long total = 0;
  for (size_t i = 0; i < idx.nu.size(); ++i) {
    if (idx.nu[i] < 0 || idx.nu[i] > idx.spins[i])
      fail(Error::Kind::Domain, "WeightIndex: need 0 <= nu_i <= l_i");
    total += idx.spins[i] - idx.nu[i];
    if (idx.nu[i] != idx.spins[i]) {
      idx.pos.push_back(static_cast<long>(i));
      idx.mult.push_back(idx.spins[i] - idx.nu[i]);
    }
  }
  idx.N = total;
  idx.r = static_cast<long>(idx.pos.size());
  return idx;
}

WeightIndex WeightIndex::complement() const {
  std::vector<long> cnu(nu.size());
  for (size_t i = 0; i < nu.size(); ++i) cnu[i] = spins[i] - nu[i];
  return mode == Mode::Sum ? complement_mode(std::move(cnu), spins)
                           : sum_mode(std::move(cnu), spins);
}

long for_each_partition(const std::vector<long>& sizes,
                        const std::function<void(const std::vector<int>&)>& fn) {
  long N = 0;
  for (long s : sizes) {
    if (s < 0) fail(Error::Kind::Domain, "for_each_partition: negative block size");
    N += s;
  }
  std::vector<int> labels;
  labels.reserve(N);
  for (size_t s = 0; s < sizes.size(); ++s)
    labels.insert(labels.end(), sizes[s], static_cast<int>(s));
  long count = 0;
  if (labels.empty()) {
    fn(labels);
    return 1;
  }
  std::sort(labels.begin(), labels.end());
  do {
    fn(labels);
    ++count;
  } while (std::next_permutation(labels.begin(), labels.end()));
  return count;
}

namespace {

// Shared core for weight_w and its residue-deflated variant. Per pair the
// global prefactor (t_a - t_b)/(q^{-2} t_a - t_b) has been combined with the
// block-crossing factors, which removes the spurious (t_a - t_b) poles:
//   same block             (t_a - t_b)       / (q^{-2} t_a - t_b)
//   block(a) before b's    1
//   block(b) before a's    (t_a - q^{-2} t_b) / (q^{-2} t_a - t_b)
cx weight_w_core(const WeightIndex& idx, std::span<const cx> t,
                 std::span<const cx> z, cx q, const DeflationSet& defl) {
  if (idx.mode != WeightIndex::Mode::Sum)
    fail(Error::Kind::Domain, "weight_w: index must be in Sum mode");
  long N = idx.N;
  if (static_cast<long>(t.size()) != N)
    fail(Error::Kind::Domain, "weight_w: t arity mismatch");
  if (t.empty() && !defl.empty())
    fail(Error::Kind::Domain, "weight_w: deflation without variables");

  cx qm2 = 1.0 / (q * q);
  // site data per block: k(s) and q^{-l_{k(s)}} z_{k(s)}
  std::vector<long> site(idx.r);
  std::vector<cx> site_pole(idx.r);
  for (long s = 0; s < idx.r; ++s) {
    site[s] = idx.pos[s];
    site_pole[s] = qpow(q, cx(static_cast<double>(-idx.spins[site[s]]), 0.0)) *
                   z[site[s]];
  }

  Kahan acc;
  for_each_partition(idx.mult, [&](const std::vector<int>& block) {
    cx term{1.0, 0.0};
    // every named deflation factor must be matched exactly once
    std::vector<bool> used(defl.size(), false);

    for (long a = 0; a < N; ++a) {
      long s = block[a];
      long ka = site[s];
      // pair factors against later positions
      for (long b = a + 1; b < N; ++b) {
        long sb = block[b];
        if (s == sb) {
          cx den = qm2 * t[a] - t[b];
          cx num = t[a] - t[b];
          bool removed = false;
          for (size_t di = 0; di < defl.size(); ++di) {
            const auto& d = defl[di];
            if (d.family == Deflation::Family::TTInside && d.s == 0 &&
                d.var == a && d.partner == static_cast<int>(b)) {
              used[di] = true;
              removed = true;
            }
          }
          if (removed) {
            term *= num;  // divided out (q^{-2} t_a - t_b)
          } else {
            check_den(den, std::abs(t[a]) + std::abs(t[b]), "a t-t pair");
            term *= num / den;
          }
        } else if (sb < s) {
          cx den = qm2 * t[a] - t[b];
          cx num = t[a] - qm2 * t[b];
          bool removed = false;
          for (size_t di = 0; di < defl.size(); ++di) {
            const auto& d = defl[di];
            if (d.family == Deflation::Family::TTInside && d.s == 0 &&
                d.var == a && d.partner == static_cast<int>(b)) {
              used[di] = true;
              removed = true;
            }
          }
          if (removed) {
            term *= num;
          } else {
            check_den(den, std::abs(t[a]) + std::abs(t[b]), "a t-t pair");
            term *= num / den;
          }
        }
        // s < sb contributes 1
      }

      // site factor t_a / (t_a - q^{-l_k} z_k)
      {
        cx den = t[a] - site_pole[s];
        bool removed = false;
        for (size_t di = 0; di < defl.size(); ++di) {
          const auto& d = defl[di];
          if (d.family == Deflation::Family::ZInside && d.s == 0 && d.var == a &&
              d.partner == static_cast<int>(ka)) {
            used[di] = true;
            removed = true;
          }
        }
        if (removed) {
          term *= t[a];
        } else {
          check_den(den, std::abs(t[a]) + std::abs(site_pole[s]), "a site factor");
          term *= t[a] / den;
        }
      }
      // crossing factors for j < k(s)
      for (long j = 0; j < ka; ++j) {
        cx qlj = qpow(q, cx(static_cast<double>(-idx.spins[j]), 0.0));
        cx num = qlj * t[a] - z[j];
        cx den = t[a] - qlj * z[j];
        bool removed = false;
        for (size_t di = 0; di < defl.size(); ++di) {
          const auto& d = defl[di];
          if (d.family == Deflation::Family::ZInside && d.s == 0 && d.var == a &&
              d.partner == static_cast<int>(j)) {
            used[di] = true;
            removed = true;
          }
        }
        if (removed) {
          term *= num;
        } else {
          check_den(den, std::abs(t[a]) + std::abs(qlj * z[j]), "a crossing factor");
          term *= num / den;
        }
      }
    }

    bool lacks_factor = false;
    for (size_t di = 0; di < defl.size(); ++di)
      if (!used[di]) lacks_factor = true;
    if (!lacks_factor) acc.add(term);
  });
  return acc.value();
}

}  // namespace

cx weight_w(const WeightIndex& idx, std::span<const cx> t, std::span<const cx> z,
            cx q) {
  return weight_w_core(idx, t, z, q, {});
}

cx weight_w_deflated(const WeightIndex& idx, std::span<const cx> t,
                     std::span<const cx> z, cx q, const DeflationSet& defl) {
  DeflationSet own;
  for (const auto& d : defl)
    if ((d.family == Deflation::Family::ZInside ||
         d.family == Deflation::Family::TTInside) &&
        d.s == 0)
      own.push_back(d);
  return weight_w_core(idx, t, z, q, own);
}

SeriesValue phase_phi(std::span<const cx> t, std::span<const cx> z,
                      const ModelParams& params, const TruncationPolicy& trunc,
                      const DeflationSet& defl) {
  const long N = static_cast<long>(t.size());
  const long n = static_cast<long>(z.size());
  SeriesValue out;
  cx q = params.q, p = params.p;
  for (long a = 0; a < N; ++a) {
    for (long i = 0; i < n; ++i) {
      cx ql = qpow(q, cx(static_cast<double>(params.spins[i]), 0.0));
      cx num_arg = ql * t[a] / z[i];
      cx den_arg = t[a] / (ql * z[i]);
      long num_skip = -1, den_skip = -1;
      for (const auto& d : defl) {
        if (d.var != a || d.partner != static_cast<int>(i)) continue;
        if (d.family == Deflation::Family::ZInside && d.s == 0) num_skip = 0;
        if (d.family == Deflation::Family::ZOutside) den_skip = d.s;
      }
      out *= num_skip < 0 ? qpoch(num_arg, p, trunc)
                          : qpoch_skip(num_arg, p, trunc, num_skip);
      out /= den_skip < 0 ? qpoch(den_arg, p, trunc)
                          : qpoch_skip(den_arg, p, trunc, den_skip);
    }
  }
  cx qm2 = 1.0 / (q * q);
  for (long a = 0; a < N; ++a)
    for (long b = a + 1; b < N; ++b) {
      long num_skip = -1, den_skip = -1;
      for (const auto& d : defl) {
        if (d.var != a || d.partner != static_cast<int>(b)) continue;
        if (d.family == Deflation::Family::TTInside && d.s == 0) num_skip = 0;
        if (d.family == Deflation::Family::TTOutside) den_skip = d.s;
      }
      cx num_arg = qm2 * t[a] / t[b];
      cx den_arg = q * q * t[a] / t[b];
      out *= num_skip < 0 ? qpoch(num_arg, p, trunc)
                          : qpoch_skip(num_arg, p, trunc, num_skip);
      out /= den_skip < 0 ? qpoch(den_arg, p, trunc)
                          : qpoch_skip(den_arg, p, trunc, den_skip);
    }
  return out;
}

SeriesValue solution_prefactor(std::span<const cx> z, const ModelParams& params,
                               const TruncationPolicy& trunc) {
  const long n = params.n_sites();
  if (static_cast<long>(z.size()) != n)
    fail(Error::Kind::Domain, "solution_prefactor: z arity mismatch");
  SeriesValue out;
  for (long i = 0; i < n; ++i) out.value *= qpow(z[i], params.a_exponents[i]);
  for (long i = 0; i < n; ++i)
    for (long j = i + 1; j < n; ++j)
      out *= xi(z[i] / z[j], params.spins[i], params.spins[j], params.q,
                params.p, trunc);
  return out;
}

cx theorem_A(const WeightIndex& idx, std::span<const cx> t, std::span<const cx> z,
             const ModelParams& params) {
  if (idx.mode != WeightIndex::Mode::Complement)
    fail(Error::Kind::Domain, "theorem_A: index must be in Complement mode");
  (void)z;
  const cx q = params.q, k = params.k, L = params.L;
  const double N = static_cast<double>(idx.N);
  const double suml = static_cast<double>(params.sum_spins());
  const long n = idx.n_sites();

  double ll = 0.0;  // sum_{i<j} l_i l_j
  for (long i = 0; i < n; ++i)
    for (long j = i + 1; j < n; ++j)
      ll += static_cast<double>(idx.spins[i] * idx.spins[j]);

  cx expo = -N * L + cx(1.5 * N * (N - 1.0) - suml * N, 0.0);
  cx block = k * ll + k * (L - 2.0 * N) * suml + 4.0 * L * N - 4.0 * N * (N - 1.0);
  expo += block / (2.0 * (k + 2.0));
  cx a = qpow(q, expo);

  a *= qpow(1.0 / (q - 1.0 / q), cx(N, 0.0));

  for (long s = 0; s < idx.r; ++s) {
    double ns = static_cast<double>(idx.mult[s]);
    double tail = 0.0;
    for (long u = s + 1; u < idx.r; ++u) tail += static_cast<double>(idx.mult[u]);
    double lks = static_cast<double>(idx.spins[idx.pos[s]]);
    a *= qpow(q, cx(tail * ns - lks * ns, 0.0));
    for (long i = 0; i < idx.mult[s]; ++i)
      a *= 1.0 - qpow(q, cx(2.0 * (lks - static_cast<double>(i)), 0.0));
  }

  for (long b = 0; b < idx.N; ++b) {
    cx texp = (2.0 * static_cast<double>(b)) / (k + 2.0) - L / (k + 2.0) - 1.0;
    a *= qpow(t[b], texp);
  }
  return a;
}

SeriesValue theorem_F(const WeightIndex& idx, std::span<const cx> t,
                      std::span<const cx> z, const ModelParams& params,
                      const TruncationPolicy& trunc) {
  if (idx.mode != WeightIndex::Mode::Complement)
    fail(Error::Kind::Domain, "theorem_F: index must be in Complement mode");
  if (static_cast<long>(t.size()) != idx.N)
    fail(Error::Kind::Domain, "theorem_F: t arity mismatch");
  const long n = idx.n_sites();
  const cx k = params.k, L = params.L;
  SeriesValue out;
  out.value = theorem_A(idx, t, z, params);
  for (const cx& ta : t)
    if (ta.real() < 0.0 && ta.imag() == 0.0) out.branch_warning = true;

  for (long i = 0; i < n; ++i) {
    double tail = 0.0;
    for (long j = i + 1; j < n; ++j) tail += static_cast<double>(idx.spins[j]);
    cx expo = static_cast<double>(idx.spins[i]) / (2.0 * (k + 2.0)) *
              (L - 2.0 * static_cast<double>(idx.N) + tail);
    out.value *= qpow(z[i], expo);
  }
  for (long i = 0; i < n; ++i)
    for (long j = i + 1; j < n; ++j)
      out *= xi(z[i] / z[j], idx.spins[i], idx.spins[j], params.q, params.p, trunc);

  out *= phase_phi(t, z, params, trunc);
  out.value *= weight_w(idx.complement(), t, z, params.q);
  return out;
}

}  // namespace qkz
