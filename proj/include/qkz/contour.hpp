#pragma once

#include <span>
#include <string>
#include <vector>

#include "qkz/deflation.hpp"
#include "qkz/params.hpp"

namespace qkz {

/// Equally spaced nodes on each circle; the periodic trapezoid rule is
/// spectrally accurate for integrands analytic near the circle.
struct QuadratureGrid {
  int Q = 256;  // power of two, >= 64
};

/// One catalogued simple pole of the integrand in the variable being
/// integrated. orientation +1 means the deformed torus must enclose it,
/// -1 that it must stay outside.
struct PoleSpec {
  cx location;
  int orientation;
  Deflation tag;
};

/// Integrand with catalogued poles. eval() must honor the deflation set:
/// for every listed deflation the corresponding vanishing factor is divided
/// out analytically and the residue jacobian applied, so that eval equals
/// lim (t_var - c) f(t) at the pinned point.
class ContourIntegrand {
 public:
  virtual ~ContourIntegrand() = default;
  virtual int dim() const = 0;
  virtual cx eval(std::span<const cx> t, const DeflationSet& defl) const = 0;
  /// Candidate poles for variable `var` given the outer values
  /// t[var+1..dim-1] (inner entries of t are meaningless at query time).
  /// Infinite pole ladders may be truncated to the ones with modulus within
  /// a factor ~2 of `radius`; the engine does the precise filtering.
  virtual std::vector<PoleSpec> poles(int var, std::span<const cx> t,
                                      const DeflationSet& defl,
                                      double radius) const = 0;
};

enum class RadiusPolicy { GeometricMean, Manual };

/// Per-variable circle radius plus the feasibility certificate. The
/// correction poles are recomputed per residue branch because their
/// locations depend on the outer variables.
struct ContourSpec {
  std::vector<double> radius;
  std::vector<std::string> certificate;
};

/// Choose radii for N equal circles from the Z-side pole families of
/// (params, z): the classic window (max_j |p q^{-l_j} z_j|, min_j |q^{l_j} z_j|)
/// when it is nonempty, otherwise the widest pole-free log-gap. Throws
/// Infeasible (with the violated inequality) when no valid radius exists.
ContourSpec plan_contour(const ModelParams& params, std::span<const cx> z, long N,
                         RadiusPolicy policy = RadiusPolicy::GeometricMean,
                         double manual_radius = 0.0);

/// Iterated corrected-circle integral of f with the measure
/// prod_a dt_a / (2 pi i t_a); variable dim-1 is outermost.
cx integrate(const ContourIntegrand& f, const ContourSpec& spec,
             const QuadratureGrid& grid);

struct ConvergenceRow {
  int Q;
  cx value;
  double diff_from_prev;  // NaN in the first row
};

/// Integrate at each Q of the ladder and report successive differences.
std::vector<ConvergenceRow> convergence_report(const ContourIntegrand& f,
                                               const ContourSpec& spec,
                                               std::span<const int> q_ladder);

}  // namespace qkz
