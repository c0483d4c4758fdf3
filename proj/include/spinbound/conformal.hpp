#pragma once

#include <string>
#include <vector>

#include "spinbound/bounds.hpp"

namespace spinbound {

/// Conformal factor u on M (g-bar = e^{2u} g). Defined intrinsically, so du(nu) = 0 holds by construction.
struct ConformalFactor {
  ScalarSpec spec;
  ScalarField field;
  bool regular = true;
};

ConformalFactor make_conformal_factor(const Discretization& d, const ScalarSpec& u);

struct TransformedGeometry {
  RVector R_bar;
  RVector R_bar_e2u;  // R-bar e^{2u}
  RVector H_bar;      // e^{-u} H
  RVector q_scale;    // Q-bar = q_scale * Q, |Q-bar|^2 = q_scale^2 |Q|^2
};

/// Transformed curvature data for n = 1, 2; throws ConfigError otherwise.
TransformedGeometry transform_geometry(const Discretization& d, const ScalarSpec& u);

/// Max over a band-limited test set of |D-bar(e^{-(n-1)u/2} phi) - e^{-(n+1)u/2} D phi| / |phi|, with D-bar
/// assembled from the spin connection of the conformal metric. Collocation grids only.
double conformal_covariance_residual(const DiscretizationPtr& base, const ScalarSpec& u, int band = -1);

/// D, D_H or D_f of (M, e^{2u} g), Hermitian in the e^{nu}-weighted product. Collocation grids only.
DiscreteOperator assemble_conformal_dirac(const DiscretizationPtr& base, const ScalarSpec& u,
                                          OperatorKind kind = OperatorKind::D, const ScalarSpec& f = {});

/// Conformal theorems (thm1_2, hijazi_zhang6_1, df_prop3) at the factor u.
BoundReport evaluate_conformal_bounds(TheoremId theorem, const DiscreteOperator& op, double lambda,
                                      const SpinorField& phi, const ScalarSpec& u);

struct QbarScaling {
  double tensor_residual = 0.0;  // max |Q-bar - e^{-u} Q| relative to max(1, max |Q|)
  double norm_residual = 0.0;    // max ||Q-bar|^2 - e^{-2u}|Q|^2| relative to max(1, max |Q|^2)
};

/// Compare the tensor of psi-bar = e^{-(n-1)u/2} phi on the conformal grid with e^{-u} Q^phi.
QbarScaling qbar_scaling_residual(const DiscretizationPtr& base, const ScalarSpec& u, const SpinorField& phi);

struct OptimizeOptions {
  int budget = 200;
  int band = 2;
  double initial_step = 0.25;
  double min_step = 1e-3;
};

struct OptimizeResult {
  ScalarSpec best;
  double rhs_initial = 0.0;
  double rhs_best = 0.0;
  Status status_best = Status::not_applicable;
  int evaluations = 0;
  bool budget_exhausted = false;
  std::vector<std::string> log;
};

/// Derivative-free coordinate search over mean-zero band-limited u maximizing the right-hand side of a
/// conformal theorem, rejecting factors for which the hypothesis fails.
OptimizeResult optimize_u(TheoremId theorem, const DiscreteOperator& op, double lambda, const SpinorField& phi,
                          const OptimizeOptions& opts = {});

struct WEMCheck {
  Status status = Status::not_applicable;
  double du_residual = 0.0;   // RMS of du - d|phi|^2 / ((n-1)|phi|^2)
  double wem_residual = 0.0;  // relative L2 residual of the weak energy-momentum equation
};

WEMCheck wem_equality_check(const SpinorField& phi, const ScalarField& u);

/// u = ln(|phi|^2)/(n-1) with its frame derivatives (the Laplacian is not filled in).
ScalarField log_density_factor(const SpinorField& phi);

}  // namespace spinbound
