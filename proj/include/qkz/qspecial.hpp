#pragma once

#include <limits>

#include "qkz/common.hpp"

namespace qkz {

/// Truncation control for the infinite products. A product stops after
/// max_terms factors or once the running factor differs from 1 by less
/// than tail_tol, whichever comes first.
struct TruncationPolicy {
  int max_terms = 400;
  double tail_tol = 1e-18;
};

/// Value of a truncated product together with an estimate of the dropped
/// tail (relative) and the smallest |factor| met in a denominator, so
/// callers can detect evaluation near a pole instead of silently getting
/// a huge number.
struct SeriesValue {
  cx value{1.0, 0.0};
  double tail_bound = 0.0;
  double nearest_zero = std::numeric_limits<double>::infinity();
  bool branch_warning = false;

  bool near_pole(double eps = kNearPoleEps) const { return nearest_zero < eps; }

  SeriesValue& operator*=(const SeriesValue& o) {
    value *= o.value;
    tail_bound += o.tail_bound;
    if (o.nearest_zero < nearest_zero) nearest_zero = o.nearest_zero;
    branch_warning = branch_warning || o.branch_warning;
    return *this;
  }
  SeriesValue& operator/=(const SeriesValue& o) {
    value /= o.value;
    tail_bound += o.tail_bound;
    if (o.nearest_zero < nearest_zero) nearest_zero = o.nearest_zero;
    branch_warning = branch_warning || o.branch_warning;
    return *this;
  }
};

/// Principal-branch complex power.
cx qpow(cx base, cx expo);

/// [n] = (q^n - q^{-n}) / (q - q^{-1}); rejects q in {0, 1, -1}.
cx qint(long n, cx q);

/// [n]! with [0]! = 1.
cx qfact(long n, cx q);

/// q-binomial [n]! / ([n-m]! [m]!); rejects m < 0 or m > n.
cx qbinom(long n, long m, cx q);

/// (z; a)_inf = prod_{i>=0} (1 - a^i z), |a| < 1.
SeriesValue qpoch(cx z, cx a, const TruncationPolicy& trunc);

/// (z; a)_inf with the i = skip factor divided out.
SeriesValue qpoch_skip(cx z, cx a, const TruncationPolicy& trunc, long skip);

/// (z; a, b)_inf = prod_{i,j>=0} (1 - a^i b^j z), |a| < 1, |b| < 1.
SeriesValue qpoch2(cx z, cx a, cx b, const TruncationPolicy& trunc);

/// theta(z) = (z; p)_inf (p/z; p)_inf (p; p)_inf, z != 0.
SeriesValue theta(cx z, cx p, const TruncationPolicy& trunc);

/// theta(z) with the linear factor vanishing at z = p^m divided out
/// (m <= 0 removes a factor of (z; p)_inf, m >= 1 one of (p/z; p)_inf).
SeriesValue theta_deflated(cx z, cx p, const TruncationPolicy& trunc, long m);

/// Scalar normalization of the R-matrix,
/// rho_{li,lj}(z) = q^{li lj/2} (q^{li+lj+2}/z; q^4)(q^{-li-lj+2}/z; q^4)
///                  / [(q^{-li+lj+2}/z; q^4)(q^{li-lj+2}/z; q^4)].
SeriesValue rho(cx z, long li, long lj, cx q, const TruncationPolicy& trunc);

/// Elliptic counterpart of rho built from (.; q^4, p)_inf ratios.
SeriesValue xi(cx z, long li, long lj, cx q, cx p, const TruncationPolicy& trunc);

}  // namespace qkz
