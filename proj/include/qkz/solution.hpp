#pragma once

#include <functional>

#include "qkz/contour.hpp"
#include "qkz/repr.hpp"
#include "qkz/weight.hpp"

namespace qkz {

/// Element of the elliptic hypergeometric space built from theta ratios,
///   W = Y(z) prod_{a,j} theta(c t_a/z_j) / prod_{a,j} theta(q^{l_j} t_a/z_j)
///         * prod_{a<b} theta(t_a/t_b)/theta(q^{-2} t_a/t_b),
/// with c = kappa^{-1/n} and Y = prod_j z_j^gamma, p^gamma = kappa^{N/n}.
/// The theta shift identity theta(p x) = -theta(x)/x forces exactly the
/// declared quasi-periodicity ratios below.
struct EllipticW {
  ModelParams params;
  TruncationPolicy trunc;
  cx theta_base;  // c
  cx y_exponent;  // gamma
  /// optional extra factor (tests use it for linearity checks); it must be
  /// regular at every catalogued pole
  std::function<cx(std::span<const cx>, std::span<const cx>)> extra;

  cx eval(std::span<const cx> t, std::span<const cx> z,
          const DeflationSet& defl = {}) const;

  /// T_a^t W / W = kappa q^{-2N+4(a+1)-2} prod_i q^{l_i}  (a is 0-based)
  cx declared_t_ratio(long a) const;
  /// T_j^z W / W = q^{-l_j N}
  cx declared_z_ratio(long j) const;
};

EllipticW build_W(const ModelParams& params, const TruncationPolicy& trunc);

/// The Tarasov-Varchenko integrand Phi * w_(nu) * W for one Sum-mode
/// component, with the full pole catalog and residue deflations.
class TvIntegrand : public ContourIntegrand {
 public:
  TvIntegrand(const ModelParams& params, std::vector<cx> z, WeightIndex idx,
              const EllipticW* w, TruncationPolicy trunc);

  int dim() const override;
  cx eval(std::span<const cx> t, const DeflationSet& defl) const override;
  std::vector<PoleSpec> poles(int var, std::span<const cx> t,
                              const DeflationSet& defl,
                              double radius) const override;

 private:
  ModelParams params_;
  std::vector<cx> z_;
  WeightIndex idx_;
  const EllipticW* w_;
  TruncationPolicy trunc_;
};

/// Assemble the solution vector: component (eps) carries
/// prefactor * I(w_(-eps), W); components with sum (l_i - eps_i) != N are
/// exactly zero.
TensorVector psi(const ModelParams& params, std::span<const cx> z,
                 const EllipticW& w, const QuadratureGrid& grid,
                 const TruncationPolicy& trunc);

/// Apply the qKZ right-hand side
///   R^_{j,j-1}(p z_j/z_{j-1}) ... R^_{j,1}(p z_j/z_1) kappa^{h_j/2}
///   R^_{j,n}(z_j/z_n) ... R^_{j,j+1}(z_j/z_{j+1})
/// to v (rightmost factor first); j is 0-based.
TensorVector apply_qkz_rhs(long j, std::span<const cx> z,
                           const ModelParams& params,
                           const TruncationPolicy& trunc,
                           const TensorVector& v);

/// max-norm relative residual of T_j Psi = K_j(z) Psi.
double qkz_residual(long j, const ModelParams& params, std::span<const cx> z,
                    const EllipticW& w, const QuadratureGrid& grid,
                    const TruncationPolicy& trunc);

}  // namespace qkz
