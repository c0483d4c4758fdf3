#pragma once

#include <string>
#include <vector>

#include "spinbound/spectral.hpp"

namespace spinbound {

enum class OperatorKind { D, D_H, D_f };

const char* to_string(OperatorKind k);
OperatorKind operator_kind_from_string(const std::string& s);

/// Coefficient vector of a spinor field in a discretization.
struct SpinorField {
  DiscretizationPtr disc;
  CVector coeffs;

  CVector nodal() const { return disc->eval * coeffs; }
  double norm() const { return disc->norm(coeffs); }
  /// Pointwise |phi|^2 at the nodes.
  RVector density() const;
};

/// Coefficient-space matrix of an operator; self-adjointness is with respect to disc->gram.
struct DiscreteOperator {
  CMatrix matrix;
  DiscretizationPtr disc;
  OperatorKind kind = OperatorKind::D;
  std::string label;
  /// Background scalar subtracted as (field / 2): H for D_H, f for D_f, zero for D.
  RVector background;
};

struct SpectrumResult {
  RVector values;
  std::vector<SpinorField> vectors;
  RVector residuals;
  std::vector<std::vector<int>> clusters;
};

struct AssemblyOptions {
  /// Mutation fixture: assemble D + H/2 instead of D - H/2.
  bool flip_mean_curvature_sign = false;
};

DiscreteOperator assemble_intrinsic_dirac(const DiscretizationPtr& d);
DiscreteOperator assemble_hypersurface_dirac(const DiscretizationPtr& d, const AssemblyOptions& opts = {});
DiscreteOperator assemble_dirac_schrodinger(const DiscretizationPtr& d, const ScalarSpec& f);

/// Nodal values of nabla_{e_i} phi, one vector per frame direction.
std::vector<CVector> covariant_derivative(const SpinorField& phi);

/// Relative deviation of gram * A from its adjoint.
double hermiticity_defect(const DiscreteOperator& op);

/// Largest eigenvalue magnitude of the form |D phi|^2 - |nabla phi|^2 - (R/4)|phi|^2 on the
/// orthonormal band-limited test space (band < 0 picks an interior band automatically).
double lichnerowicz_residual(const Discretization& d, int band = -1);

/// Same for |D_H phi|^2 - |W phi|^2 with W the Witten operator built from the ambient connection.
double witten_identity_residual(const Discretization& d, int band = -1, const AssemblyOptions& opts = {});

/// Nodal map (coefficients -> ambient spinor values) of the Witten operator.
CMatrix witten_operator(const Discretization& d);

/// `count` eigenpairs of smallest |lambda|, ascending. Throws NumericalError on non-Hermitian input.
SpectrumResult eigensolve(const DiscreteOperator& op, int count);

}  // namespace spinbound
