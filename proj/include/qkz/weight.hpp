#pragma once

#include <functional>
#include <span>
#include <vector>

#include "qkz/deflation.hpp"
#include "qkz/params.hpp"
#include "qkz/qspecial.hpp"

namespace qkz {

/// Weight multi-index (nu_1..nu_n), 0 <= nu_i <= l_i, in one of two modes:
///   Sum        requires sum nu_i = N; r counts nu_i != 0, n_s = nu_{k(s)}
///   Complement requires sum (l_i - nu_i) = N; r counts nu_i != l_i,
///              n_s = l_{k(s)} - nu_{k(s)}
struct WeightIndex {
  enum class Mode { Sum, Complement };

  Mode mode = Mode::Sum;
  std::vector<long> nu;
  std::vector<long> spins;
  long N = 0;
  long r = 0;
  std::vector<long> pos;   // k(1) < ... < k(r), 0-based site indices
  std::vector<long> mult;  // n_1 .. n_r

  static WeightIndex sum_mode(std::vector<long> nu, std::vector<long> spins);
  static WeightIndex complement_mode(std::vector<long> nu, std::vector<long> spins);

  /// (-nu) = (l_1 - nu_1, ..., l_n - nu_n) in the opposite mode.
  WeightIndex complement() const;

  long n_sites() const { return static_cast<long>(spins.size()); }
};

/// Visit every ordered partition Gamma_1 u ... u Gamma_r of {0..N-1} with
/// |Gamma_s| = sizes[s], encoded as a block label per position, in
/// lexicographic label order. Returns the number of partitions visited.
long for_each_partition(const std::vector<long>& sizes,
                        const std::function<void(const std::vector<int>&)>& fn);

/// Tarasov-Varchenko weight function w_(nu) for a Sum-mode index; the
/// per-pair rational factors are combined analytically so coincident
/// t-values stay finite. Poles within near_eps of an evaluation point
/// raise PoleHit.
cx weight_w(const WeightIndex& idx, std::span<const cx> t, std::span<const cx> z,
            cx q);

/// Residue-aware variant: every Deflation must name a weight-function
/// denominator factor in the corresponding variable; partition terms that
/// do not contain all named factors contribute 0. Returns
/// lim prod_defl (den-factor) * w with those factors divided out.
cx weight_w_deflated(const WeightIndex& idx, std::span<const cx> t,
                     std::span<const cx> z, cx q, const DeflationSet& defl);

/// Phase function Phi(t, z): Pochhammer ratios in (.; p)_inf. Deflations
/// divide out the matching vanishing numerator/denominator factor.
SeriesValue phase_phi(std::span<const cx> t, std::span<const cx> z,
                      const ModelParams& params, const TruncationPolicy& trunc,
                      const DeflationSet& defl = {});

/// prod_i z_i^{a_i} * prod_{i<j} xi_{l_i,l_j}(z_i/z_j).
SeriesValue solution_prefactor(std::span<const cx> z, const ModelParams& params,
                               const TruncationPolicy& trunc);

/// The scalar A^{(nu)}(t, z) of the closed-form solution, Complement mode.
cx theorem_A(const WeightIndex& idx, std::span<const cx> t, std::span<const cx> z,
             const ModelParams& params);

/// Full closed form F^{(nu)}(t, z) =
/// A^{(nu)} * prod z_i^{l_i(L - 2N + sum_{j>i} l_j)/(2(k+2))} * prod xi
/// * Phi * w_(-nu), for a Complement-mode index.
SeriesValue theorem_F(const WeightIndex& idx, std::span<const cx> t,
                      std::span<const cx> z, const ModelParams& params,
                      const TruncationPolicy& trunc);

}  // namespace qkz
