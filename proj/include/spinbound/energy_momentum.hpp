#pragma once

#include <vector>

#include "spinbound/dirac.hpp"

namespace spinbound {

/// Pointwise energy-momentum tensor of a spinor, undefined on the (numerical) zero set.
struct EMTensorField {
  std::vector<RMatrix> Q;      // per node, n x n symmetric; zero where masked
  std::vector<bool> masked;    // true where |phi|^2 < 1e-8 max |phi|^2
  RVector density;             // |phi|^2 per node
  int masked_count = 0;
  bool mask_warning = false;   // more than half of the nodes masked

  double trace(int node) const { return Q[static_cast<std::size_t>(node)].trace(); }
  double frobenius_sq(int node) const { return Q[static_cast<std::size_t>(node)].squaredNorm(); }
  double mask_fraction() const {
    return masked.empty() ? 0.0 : static_cast<double>(masked_count) / static_cast<double>(masked.size());
  }
};

inline constexpr double kZeroSetRelative = 1e-8;
/// EM residual below which a spinor counts as an EM-spinor.
inline constexpr double kEMCertification = 1e-6;

EMTensorField compute_Q(const SpinorField& phi);

/// Max over unmasked nodes of |tr Q |phi|^2 - Re(D phi, phi)|.
double trace_identity_residual(const SpinorField& phi, const EMTensorField& q);

struct EMSpinorCheck {
  double residual = 0.0;       // relative L2 norm of nabla_i phi + sum_j Q_ij e_j . phi
  double trace_spread = 0.0;   // max - min of tr Q over unmasked nodes
  bool t_killing = false;      // EM-spinor with constant tr Q
};

EMSpinorCheck em_spinor_residual(const SpinorField& phi, const EMTensorField& q);

struct QtrCheck {
  Status status = Status::not_applicable;  // strict when evaluated
  double residual = 0.0;
};

/// |(tr Q)^2 - R/4 - |Q|^2|, evaluated only for certified EM-spinors.
QtrCheck qtr_identity_residual(const SpinorField& phi, const EMTensorField& q);

/// Per-node e_i . nu . phi values, i.e. the nodal vectors sum_j M_j C_j phi for a per-node n-vector M.
CVector clifford_combination(const Discretization& d, const CVector& nodal_phi, const RMatrix& coeff_per_node);

}  // namespace spinbound
