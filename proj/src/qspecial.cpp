#include "qkz/qspecial.hpp"

#include <cmath>

namespace qkz {

cx qpow(cx base, cx expo) {
  if (base == cx(0.0, 0.0)) {
    if (expo == cx(0.0, 0.0)) return {1.0, 0.0};
    return {0.0, 0.0};
  }
  if (expo.imag() == 0.0 && expo.real() == std::floor(expo.real()) &&
      std::abs(expo.real()) <= 64.0) {
    // exact integer powers keep small-spin arithmetic free of log/exp noise
    long n = static_cast<long>(expo.real());
    cx b = n >= 0 ? base : cx(1.0, 0.0) / base;
    long m = std::labs(n);
    cx r{1.0, 0.0};
    while (m > 0) {
      if (m & 1) r *= b;
      b *= b;
      m >>= 1;
    }
    return r;
  }
  return std::exp(expo * std::log(base));
}

cx qint(long n, cx q) {
  if (q == cx(0.0, 0.0) || q == cx(1.0, 0.0) || q == cx(-1.0, 0.0))
    fail(Error::Kind::Domain, "qint: q must not be 0, 1 or -1");
  cx qn = qpow(q, cx(static_cast<double>(n), 0.0));
  return (qn - 1.0 / qn) / (q - 1.0 / q);
}

cx qfact(long n, cx q) {
  if (n < 0) fail(Error::Kind::Domain, "qfact: n must be nonnegative");
  cx r{1.0, 0.0};
  for (long i = 1; i <= n; ++i) r *= qint(i, q);
  return r;
}

cx qbinom(long n, long m, cx q) {
  if (m < 0 || m > n)
    fail(Error::Kind::Domain, "qbinom: need 0 <= m <= n");
  return qfact(n, q) / (qfact(n - m, q) * qfact(m, q));
}

namespace {

SeriesValue poch_impl(cx z, cx a, const TruncationPolicy& trunc, long skip) {
  if (std::abs(a) >= 1.0)
    fail(Error::Kind::Domain, "qpoch: base |a| must be < 1");
  SeriesValue out;
  if (z == cx(0.0, 0.0)) return out;
  cx term = z;
  double amag = std::abs(a);
  long i = 0;
  for (; i < trunc.max_terms; ++i) {
    double tmag = std::abs(term);
    if (tmag < trunc.tail_tol) break;
    if (i != skip) {
      cx f = 1.0 - term;
      double fmag = std::abs(f);
      if (fmag < out.nearest_zero) out.nearest_zero = fmag;
      out.value *= f;
    }
    term *= a;
  }
  // dropped tail: sum_{j>=i} |a|^j |z| = |a|^i |z| / (1-|a|)
  double tail = std::abs(z) * std::pow(amag, static_cast<double>(i));
  out.tail_bound = amag < 1.0 ? tail / (1.0 - amag) : tail;
  return out;
}

}  // namespace

SeriesValue qpoch(cx z, cx a, const TruncationPolicy& trunc) {
  return poch_impl(z, a, trunc, -1);
}

SeriesValue qpoch_skip(cx z, cx a, const TruncationPolicy& trunc, long skip) {
  return poch_impl(z, a, trunc, skip);
}

SeriesValue qpoch2(cx z, cx a, cx b, const TruncationPolicy& trunc) {
  if (std::abs(a) >= 1.0 || std::abs(b) >= 1.0)
    fail(Error::Kind::Domain, "qpoch2: bases must have modulus < 1");
  SeriesValue out;
  cx row = z;
  for (long i = 0; i < trunc.max_terms; ++i) {
    if (std::abs(row) < trunc.tail_tol) break;
    out *= qpoch(row, b, trunc);
    row *= a;
  }
  return out;
}

SeriesValue theta(cx z, cx p, const TruncationPolicy& trunc) {
  if (z == cx(0.0, 0.0)) fail(Error::Kind::Domain, "theta: z must be nonzero");
  SeriesValue out = qpoch(z, p, trunc);
  out *= qpoch(p / z, p, trunc);
  out *= qpoch(p, p, trunc);
  return out;
}

SeriesValue theta_deflated(cx z, cx p, const TruncationPolicy& trunc, long m) {
  if (z == cx(0.0, 0.0)) fail(Error::Kind::Domain, "theta: z must be nonzero");
  SeriesValue out;
  if (m <= 0) {
    out = qpoch_skip(z, p, trunc, -m);
    out *= qpoch(p / z, p, trunc);
  } else {
    out = qpoch(z, p, trunc);
    out *= qpoch_skip(p / z, p, trunc, m - 1);
  }
  out *= qpoch(p, p, trunc);
  return out;
}

SeriesValue rho(cx z, long li, long lj, cx q, const TruncationPolicy& trunc) {
  if (z == cx(0.0, 0.0)) fail(Error::Kind::Domain, "rho: z must be nonzero");
  cx q4 = q * q * q * q;
  if (std::abs(q4) >= 1.0) fail(Error::Kind::Domain, "rho: need |q^4| < 1");
  if (li == 0 || lj == 0) return SeriesValue{};  // the four products coincide
  cx zi = 1.0 / z;
  double dli = static_cast<double>(li), dlj = static_cast<double>(lj);
  SeriesValue out = qpoch(qpow(q, cx(dli + dlj + 2.0, 0.0)) * zi, q4, trunc);
  out *= qpoch(qpow(q, cx(-dli - dlj + 2.0, 0.0)) * zi, q4, trunc);
  out /= qpoch(qpow(q, cx(-dli + dlj + 2.0, 0.0)) * zi, q4, trunc);
  out /= qpoch(qpow(q, cx(dli - dlj + 2.0, 0.0)) * zi, q4, trunc);
  out.value *= qpow(q, cx(dli * dlj / 2.0, 0.0));
  return out;
}

SeriesValue xi(cx z, long li, long lj, cx q, cx p, const TruncationPolicy& trunc) {
  if (z == cx(0.0, 0.0)) fail(Error::Kind::Domain, "xi: z must be nonzero");
  cx q4 = q * q * q * q;
  if (std::abs(q4) >= 1.0 || std::abs(p) >= 1.0)
    fail(Error::Kind::Domain, "xi: need |q^4| < 1 and |p| < 1");
  if (li == 0 || lj == 0) return SeriesValue{};  // numerator equals denominator
  cx zi = 1.0 / z;
  double dli = static_cast<double>(li), dlj = static_cast<double>(lj);
  SeriesValue out = qpoch2(p * qpow(q, cx(dli + dlj + 2.0, 0.0)) * zi, q4, p, trunc);
  out *= qpoch2(p * qpow(q, cx(-dli - dlj + 2.0, 0.0)) * zi, q4, p, trunc);
  out /= qpoch2(p * qpow(q, cx(dli - dlj + 2.0, 0.0)) * zi, q4, p, trunc);
  out /= qpoch2(p * qpow(q, cx(-dli + dlj + 2.0, 0.0)) * zi, q4, p, trunc);
  return out;
}

}  // namespace qkz
