#include "qkz/params.hpp"

#include <cmath>
#include <numeric>

#include "qkz/qspecial.hpp"

namespace qkz {

long ModelParams::sum_spins() const {
  return std::accumulate(spins.begin(), spins.end(), 0L);
}

long ModelParams::max_spin() const {
  long m = 0;
  for (long l : spins) m = std::max(m, l);
  return m;
}

ModelParams derive(cx q, cx k, cx L, std::vector<long> spins, long N) {
  if (std::abs(q) >= 1.0 || q == cx(0.0, 0.0))
    fail(Error::Kind::Domain, "derive: need 0 < |q| < 1");
  if (spins.empty())
    fail(Error::Kind::Domain, "derive: spins must be nonempty");
  for (long l : spins)
    if (l < 0) fail(Error::Kind::Domain, "derive: spins must be nonnegative");
  if (N < 0) fail(Error::Kind::Domain, "derive: N must be nonnegative");

  ModelParams mp;
  mp.q = q;
  mp.k = k;
  mp.L = L;
  mp.spins = std::move(spins);
  mp.N = N;
  mp.p = qpow(q, 2.0 * (k + 2.0));
  if (std::abs(mp.p) >= 1.0)
    fail(Error::Kind::Domain, "derive: |p| = |q^{2(k+2)}| must be < 1");

  double suml = static_cast<double>(mp.sum_spins());
  mp.kappa = qpow(q, -2.0 * (L + suml / 2.0 - static_cast<double>(N) + 1.0));

  mp.a_exponents.reserve(mp.spins.size());
  for (long li : mp.spins) {
    cx ai = (static_cast<double>(li) / (2.0 * (k + 2.0))) *
            (L + suml - static_cast<double>(li) / 2.0 -
             static_cast<double>(N) + 1.0);
    mp.a_exponents.push_back(ai);
  }

  // The circle-plus-corrections contour needs |p| < |q|^{2 l_j} for every j.
  mp.contour_feasible = true;
  double pm = std::abs(mp.p), qm = std::abs(q);
  for (long lj : mp.spins)
    if (pm >= std::pow(qm, 2.0 * static_cast<double>(lj)))
      mp.contour_feasible = false;

  return mp;
}

cx delta_weight(cx j, cx k) {
  if (k == cx(-2.0, 0.0))
    fail(Error::Kind::Domain, "delta_weight: k = -2 is singular");
  return j * (j + 2.0) / (4.0 * (k + 2.0));
}

}  // namespace qkz
