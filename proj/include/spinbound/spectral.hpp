#pragma once

#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "spinbound/clifford.hpp"
#include "spinbound/geometry.hpp"

namespace spinbound {

enum class BasisKind { fourier_antiperiodic, fourier_periodic, spherical_harmonic };

const char* to_string(BasisKind b);
BasisKind basis_kind_from_string(const std::string& s);

/// Closed-form scalar field on a model (potential f or conformal factor u).
///
/// Term types: "constant"; "cos"/"sin" of k1*t (curves) or k1*x + k2*y (tori), with wavenumbers
/// in units of 2*pi/period; "coord": the unit-position component `axis` on spheres.
struct ScalarTerm {
  std::string type = "constant";
  double amplitude = 0.0;
  int k1 = 0;
  int k2 = 0;
  int axis = 0;
};

struct ScalarSpec {
  std::vector<ScalarTerm> terms;

  static ScalarSpec constant(double c) { return {{{"constant", c, 0, 0, 0}}}; }
  bool is_zero() const;
};

/// Nodal values of a scalar, its derivatives along the orthonormal frame, and its Laplacian.
struct ScalarField {
  RVector value;
  RMatrix grad;  // nodes x n
  RVector laplacian;
};

/// Spectral discretization of the spinor bundle S (or S+ for odd n) of a model.
///
/// Coefficient vectors live in `dim`-dimensional space; `eval` maps them to nodal spinor values
/// (node-major, s components per node). `nabla[i]` maps coefficients to nodal values of the
/// spin covariant derivative along the orthonormal frame vector e_i. Per-node Clifford data:
/// `tangent[node][i]` is the action of e_i . nu on S; the ambient action (for the Witten
/// operator) lives on an s_amb-dimensional space reached through the isometric `lift`.
struct Discretization {
  HypersurfaceModel model;
  BasisKind basis = BasisKind::fourier_antiperiodic;
  int resolution = 0;
  int n = 1;
  int s = 1;
  int s_amb = 0;
  int nodes = 0;
  int dim = 0;
  bool collocation = true;

  std::vector<std::vector<double>> coords;
  RVector weights;
  CMatrix eval;
  std::vector<CMatrix> nabla;
  std::vector<std::vector<CMatrix>> tangent;
  std::vector<std::vector<CMatrix>> ambient_e;
  std::vector<CMatrix> ambient_nu;
  CMatrix lift;
  std::vector<RMatrix> h;
  RVector H;
  RVector R;
  CMatrix gram;

  /// Hermitian operators commuting with D, used to fix bases inside degenerate eigenspaces.
  std::vector<CMatrix> momenta;
  /// Dirac matrix that is Hermitian by construction (conformal families on collocation grids).
  std::optional<CMatrix> dirac_override;

  /// Set for conformally transformed discretizations: parent and factor (on the parent).
  std::shared_ptr<const Discretization> parent;
  std::optional<ScalarField> conformal_factor;

  // Chart-level data used by closed-form scalar fields.
  std::vector<RMatrix> chart_frame;  // per node, n x c: e_i = sum_a F_ia d/dx^a
  std::vector<Eigen::Vector3d> unit_position;  // spheres only
  double sphere_radius = 0.0;

  bool has_ambient() const { return s_amb > 0; }
  bool has_h() const { return !h.empty() && h.front().size() > 0; }
  /// Per-node action of e_i . nu.
  std::vector<CMatrix> tangent_column(int i) const;

  CVector evaluate(const CVector& coeffs) const { return eval * coeffs; }
  /// Weighted least-squares coefficients reproducing nodal values.
  CVector project(const CVector& nodal) const;
  /// Weighted inner product of coefficient vectors.
  cplx inner(const CVector& a, const CVector& b) const { return a.dot(gram * b); }
  double norm(const CVector& a) const { return std::sqrt(std::max(0.0, std::real(inner(a, a)))); }
  /// Integral of a nodal scalar with the quadrature weights.
  double integrate(const RVector& nodal) const { return weights.dot(nodal); }

  /// Orthonormal (in the weighted product) coefficient vectors spanning the modes up to `band`
  /// (|kappa| for Fourier, l for harmonics).
  CMatrix band_vectors(int band) const;
  int max_band() const;

  /// Evaluate a closed-form scalar at the nodes.
  ScalarField scalar(const ScalarSpec& spec) const;
};

using DiscretizationPtr = std::shared_ptr<const Discretization>;

/// Default basis for a model: antiperiodic Fourier for curves, periodic Fourier for tori,
/// spherical harmonics for spheres.
BasisKind default_basis(const HypersurfaceModel& model);

/// resolution: N grid points for curves (even for antiperiodic), N per direction for tori (odd),
/// band limit L for spheres.
DiscretizationPtr discretize(const HypersurfaceModel& model, int resolution,
                             std::optional<BasisKind> basis = std::nullopt);

/// Discretization of (M, e^{2u} g) for a regular conformal change: frame e^{-u} e_i, spin
/// connection of the conformal metric, weights e^{nu} dv, H -> e^{-u} H, R per the n = 1, 2 law.
DiscretizationPtr conformal_transform(const DiscretizationPtr& base, const ScalarSpec& u);

/// Apply per-node s_out x s_in matrices to node-major rows of X.
CMatrix pointwise(const std::vector<CMatrix>& per_node, const CMatrix& x, int s_in);
/// Multiply node-major rows by a per-node scalar.
CMatrix scale_rows(const RVector& per_node, const CMatrix& x, int s);

/// Nodal values of sum_i e_i . nu . nabla_{e_i} applied to coefficient vectors.
CMatrix nodal_dirac(const Discretization& d);

/// Galerkin/collocation coefficient-space matrix of a nodal-valued linear map P.
CMatrix to_coefficient_space(const Discretization& d, const CMatrix& nodal_map);

/// Random coefficient vector with Gaussian weights on modes up to `band`, unit norm.
CVector random_coefficients(const Discretization& d, std::mt19937_64& rng, int band);

/// Gauss-Legendre nodes and weights on [-1, 1].
std::pair<RVector, RVector> gauss_legendre(int count);

}  // namespace spinbound
