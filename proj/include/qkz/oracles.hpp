#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qkz/params.hpp"
#include "qkz/qspecial.hpp"
#include "qkz/weight.hpp"

namespace qkz {

/// Outcome of one identity check at one parameter sample.
struct IdentityReport {
  std::string id;
  std::string sample;
  cx lhs{0.0, 0.0};
  cx rhs{0.0, 0.0};
  double residual = 0.0;  // |lhs-rhs| / (|lhs|+|rhs|+eps), or scaled absolute
  double tol = 0.0;
  bool pass = false;
  std::string notes;
};

IdentityReport make_report(const std::string& id, const std::string& sample,
                           cx lhs, cx rhs, double tol);
/// For vanishing identities: pass iff |lhs| < tol * max_term.
IdentityReport make_vanishing_report(const std::string& id,
                                     const std::string& sample, cx lhs,
                                     double max_term, double tol);

// --- combinatorial lemmas -------------------------------------------------

/// Subset sum of q^2 over crossing pairs equals q^{m(n-m)} [n m].
IdentityReport lemma_combi_i(long n, long m, cx q);
/// Signed version: sum of prod_{i<j} q^{mu_i} equals q^{-n(n-1)/2+m(n-1)} [n m].
IdentityReport lemma_combi_ii(long n, long m, cx q);
/// Antisymmetrized monomial sum against prod (t_sb - q^{-2} t_sa).
IdentityReport lemma_sym(long n, const std::vector<long>& positions,
                         const std::vector<cx>& t, cx q);
/// The z-independent double sum over s and S_n.
IdentityReport lemma_z(long n, long l, cx z, const std::vector<cx>& t, cx q);

// --- free-field product formula machinery ---------------------------------

/// Signs are +-1; slots are indexed (block s, 1-based j within block) in
/// lexicographic order, matching a Complement-mode WeightIndex.
struct SlotSigns {
  std::vector<std::vector<int>> mu;  // mu[s][j-1] in {+1,-1}
  long count_minus(long s) const;
  long total() const;
};

/// Value of the integrand product G^_(eps)(mu)(m) at numeric u, and of the
/// full G (with the epsilon t-factor) when with_t_factor is set.
cx ghat_integrand(const WeightIndex& idx, const SlotSigns& mu,
                  const std::vector<long>& m, const std::vector<int>& eps,
                  std::span<const cx> t, std::span<const cx> z,
                  std::span<const cx> u, const ModelParams& params,
                  bool with_t_factor = false);

/// Closed form of the iterated u-integral of G^ (sum over C/D splittings
/// and residue assignments).
cx ihat_closed(const WeightIndex& idx, const SlotSigns& mu,
               const std::vector<long>& m, const std::vector<int>& eps,
               std::span<const cx> t, std::span<const cx> z,
               const ModelParams& params);

/// r = 1, n_1 = 1 check of ihat_closed against direct numeric contour
/// integration in the single u variable.
IdentityReport lemma_i_check(const WeightIndex& idx, const SlotSigns& mu,
                             const std::vector<long>& m,
                             const std::vector<int>& eps,
                             std::span<const cx> t, std::span<const cx> z,
                             const ModelParams& params, int Q = 256);

/// Closed form of J^_(eps)(a).
cx jhat_closed(const WeightIndex& idx, const std::vector<long>& a,
               const std::vector<int>& eps, std::span<const cx> t,
               std::span<const cx> z, const ModelParams& params);

/// J^_(eps)(a) assembled from its definition: the (mu) and (m) sums over
/// ihat_closed with the binomial weights.
cx jhat_from_definition(const WeightIndex& idx, const std::vector<long>& a,
                        const std::vector<int>& eps, std::span<const cx> t,
                        std::span<const cx> z, const ModelParams& params);

IdentityReport jhat_prop_check(const WeightIndex& idx, const std::vector<long>& a,
                               const std::vector<int>& eps,
                               std::span<const cx> t, std::span<const cx> z,
                               const ModelParams& params);

/// The epsilon-sum identity behind the vanishing lemma. b_slots lists the
/// assigned t-indices (0-based, distinct); both branches are covered:
/// alpha < N vanishing and alpha = N closed form.
IdentityReport eps_sum_identity(const std::vector<long>& b_slots, long N, cx q,
                                std::span<const cx> t);

/// J_(a) from the epsilon sum over jhat_closed.
cx j_of_a(const WeightIndex& idx, const std::vector<long>& a,
          std::span<const cx> t, std::span<const cx> z,
          const ModelParams& params, double* max_term = nullptr);

/// Proposition 2, part (a): J_(a) = 0 for (a) != (n).
std::vector<IdentityReport> mainprop_vanishing(const WeightIndex& idx,
                                               std::span<const cx> t,
                                               std::span<const cx> z,
                                               const ModelParams& params);
/// Proposition 2, part (b): J_(n) = const * w_(-nu), plus a ratio-constancy
/// record over extra (t, z) samples.
IdentityReport mainprop_closed_form(const WeightIndex& idx, std::span<const cx> t,
                                    std::span<const cx> z,
                                    const ModelParams& params);

/// The displayed (a) = (n) partition-sum form against the epsilon-sum route.
IdentityReport eq_a_n_check(const WeightIndex& idx, std::span<const cx> t,
                            std::span<const cx> z, const ModelParams& params);

/// Normalization conversion between the proof-final display of the weight
/// sum and the canonical w: per block s each of the n_s positions carries
/// -q^{-sum_{j<=k(s)} l_j}, so the total factor is
/// (-1)^N q^{-sum_s n_s sum_{j<=k(s)} l_j}.
cx w_proof_conversion(const WeightIndex& sum_mode_idx, cx q);

/// Closed-form prefactor f^{(nu)} of the operator product formula.
cx f_nu(const WeightIndex& idx, std::span<const cx> t, std::span<const cx> z,
        const ModelParams& params, const TruncationPolicy& trunc);

/// theorem_F against the route through f^{(nu)} Phi sum_(a) J_(a);
/// positive real parameters keep complex powers branch-exact.
IdentityReport theorem_f_cross_check(const WeightIndex& idx,
                                     std::span<const cx> t,
                                     std::span<const cx> z,
                                     const ModelParams& params,
                                     const TruncationPolicy& trunc);

}  // namespace qkz
