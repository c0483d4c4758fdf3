#pragma once

#include <vector>

#include "spinbound/energy_momentum.hpp"

namespace spinbound {

/// Pointwise parameters p, q of the modified connections and the shift p * b / 2 + q * lambda,
/// where b is the background field (mean curvature H or potential f).
struct ConnectionParams {
  RVector p, q, shift;
  RVector background;
  double lambda = 0.0;
  Status status = Status::not_applicable;
  /// Nodes where the parameters are defined (unmasked and strictly inside the hypothesis).
  std::vector<bool> defined;
  /// For the Einstein-type choice: sign(lambda)/(2n) sqrt(n R/(n-1)) per node.
  RVector predicted_shift;
};

inline constexpr double kHypothesisRelative = 1e-8;
inline constexpr double kZeroBackground = 1e-10;

/// Parameters from arbitrary p and q fields.
ConnectionParams make_params(const RVector& p, const RVector& q, double lambda, const RVector& background);

/// Choice n q^2 = |b| / (sqrt(S + 4|Q|^2) - |b|), p = -1/(n q), with S = R unless `scalar` is given
/// (the conformal variant passes R-bar e^{2u}). Classifies S + 4|Q|^2 > b^2 > 0 pointwise; nodes with
/// |b| < 1e-10 use q = p = 0.
ConnectionParams pq_thm1(const Discretization& d, const EMTensorField& q, double lambda, const RVector& background,
                         const RVector* scalar = nullptr);

/// Einstein-type choice (1 - n q)^2 = (n-1)|b| / (sqrt(n S/(n-1)) - |b|), p = (1-q)/(1-nq), under
/// n S > (n-1) b^2 > 0. Not applicable for n = 1.
ConnectionParams pq_zhang(const Discretization& d, double lambda, const RVector& background,
                          const RVector* scalar = nullptr, const std::vector<bool>* masked = nullptr);

struct ModifiedDerivative {
  std::vector<CVector> fields;  // nodal values per frame direction
  double norm = 0.0;            // relative L2 norm over defined nodes
};

/// nabla_i + s e_i . nu + sum_j Q_ij e_j . nu
ModifiedDerivative nabla_Q_apply(const SpinorField& phi, const ConnectionParams& params, const EMTensorField& q);
/// nabla_i + s e_i . nu
ModifiedDerivative nabla_lambda_apply(const SpinorField& phi, const ConnectionParams& params);

/// Max pointwise |(|nabla^Q phi|^2) - (|nabla phi|^2 + n s^2 |phi|^2 - |Q|^2 |phi|^2)|, relative to max |phi|^2.
double qformula_residual(const SpinorField& phi, const ConnectionParams& params, const EMTensorField& q);

/// |int |nabla^Q phi|^2 - int (1 + n q^2)[lambda^2 - (sqrt(R + 4|Q|^2) - |b|)^2 / 4] |phi|^2| / |phi|^2.
double integral_identity_residual(const SpinorField& phi, const ConnectionParams& params, const EMTensorField& q);

}  // namespace spinbound
