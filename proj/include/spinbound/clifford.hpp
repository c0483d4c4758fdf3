#pragma once

#include <optional>
#include <vector>

#include "spinbound/types.hpp"

namespace spinbound {

/// Irreducible complex Clifford representation with e_i e_j + e_j e_i = -2 delta_ij.
/// Generators are unitary and skew-Hermitian; the Hermitian form is the standard one.
struct GammaSet {
  int n = 0;
  int dim_spinor = 0;
  std::vector<CMatrix> generators;

  const CMatrix& operator[](int i) const { return generators[static_cast<std::size_t>(i)]; }
  CMatrix identity() const { return CMatrix::Identity(dim_spinor, dim_spinor); }

  /// Clifford action of the real vector sum_i x_i e_i.
  CMatrix vector_action(const std::vector<double>& x) const;
};

struct ChiralitySplit {
  CMatrix projector_plus;
  CMatrix projector_minus;
  CMatrix defining_operator;
};

/// Recursive tensor-product construction. For odd n the last generator's sign is chosen so
/// that the complex volume element acts as +Identity.
GammaSet build_gamma(int n);

/// omega_n = i^{floor((n+1)/2)} e_1 ... e_n.
CMatrix volume_element(const GammaSet& g);

/// Tangent generators h_i = g_i g_nu (nu = last ambient generator): the map e_i -> e_i . nu.
GammaSet alpha_embed(const GammaSet& ambient);

/// Unitary U with U A_i = B_i U for all i, or nullopt when the representations are
/// inequivalent. Null space of the stacked linear system, then polar correction.
std::optional<CMatrix> find_intertwiner(const GammaSet& a, const GammaSet& b, double tol = 1e-10);

/// S+/S- of the hypersurface spinor space: eigenspaces of i nu (n even) or omega_{n+1} (n odd),
/// where n + 1 = ambient.n.
ChiralitySplit chirality_split(const GammaSet& ambient);

/// Compress each generator onto the range of an orthogonal projector.
GammaSet restrict_to(const GammaSet& g, const CMatrix& projector);

/// Orthonormal basis (columns) of the range of a Hermitian projector.
CMatrix projector_range(const CMatrix& projector);

/// Max entry deviation from the Clifford relations, unitarity and skew-Hermiticity.
double clifford_relation_defect(const GammaSet& g);

}  // namespace spinbound
