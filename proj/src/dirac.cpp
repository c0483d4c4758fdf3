#include "spinbound/dirac.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#define lapack_complex_double std::complex<double>
#include <lapacke.h>

namespace spinbound {

namespace {

CMatrix identity_blocks(const Discretization& d, const RVector& scale) {
  std::vector<CMatrix> blocks;
  blocks.reserve(static_cast<std::size_t>(d.nodes));
  for (int p = 0; p < d.nodes; ++p) blocks.push_back(scale(p) * CMatrix::Identity(d.s, d.s));
  return pointwise(blocks, d.eval, d.s);
}

CMatrix dirac_matrix(const Discretization& d) {
  if (d.dirac_override) return *d.dirac_override;
  return to_coefficient_space(d, nodal_dirac(d));
}

DiscreteOperator shifted(const DiscretizationPtr& d, const RVector& field, double sign, OperatorKind kind,
                         std::string label) {
  DiscreteOperator op;
  op.disc = d;
  op.kind = kind;
  op.label = std::move(label);
  op.background = field;
  op.matrix = dirac_matrix(*d) - sign * 0.5 * to_coefficient_space(*d, identity_blocks(*d, field));
  return op;
}

int interior_band(const Discretization& d) {
  // Leave room for the derivative to stay resolved by the grid or the quadrature.
  if (d.basis == BasisKind::spherical_harmonic) return std::max(1, d.resolution - 2);
  return std::max(1, d.max_band() / 2);
}

double hermitian_norm(const CMatrix& m) {
  const CMatrix h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

CMatrix weighted_form(const Discretization& d, const CMatrix& a, const CMatrix& b, int s) {
  RVector w(a.rows());
  for (int p = 0; p < d.nodes; ++p) w.segment(p * s, s).setConstant(d.weights(p));
  return a.adjoint() * w.asDiagonal() * b;
}

}  // namespace

const char* to_string(OperatorKind k) {
  switch (k) {
    case OperatorKind::D: return "D";
    case OperatorKind::D_H: return "D_H";
    case OperatorKind::D_f: return "D_f";
  }
  return "unknown";
}

OperatorKind operator_kind_from_string(const std::string& s) {
  if (s == "D") return OperatorKind::D;
  if (s == "D_H") return OperatorKind::D_H;
  if (s == "D_f") return OperatorKind::D_f;
  throw ConfigError("operator.kind: unknown operator '" + s + "' (expected D, D_H or D_f)");
}

RVector SpinorField::density() const {
  const CVector v = nodal();
  RVector out(disc->nodes);
  for (int p = 0; p < disc->nodes; ++p) out(p) = v.segment(p * disc->s, disc->s).squaredNorm();
  return out;
}

DiscreteOperator assemble_intrinsic_dirac(const DiscretizationPtr& d) {
  return shifted(d, RVector::Zero(d->nodes), 0.0, OperatorKind::D, "D");
}

DiscreteOperator assemble_hypersurface_dirac(const DiscretizationPtr& d, const AssemblyOptions& opts) {
  if (!d->has_h())
    throw ConfigError(std::string("operator.kind: D_H needs a hypersurface; ") + to_string(d->model.kind) +
                      " is intrinsic-only");
  const double sign = opts.flip_mean_curvature_sign ? -1.0 : 1.0;
  return shifted(d, d->H, sign, OperatorKind::D_H, "D_H");
}

DiscreteOperator assemble_dirac_schrodinger(const DiscretizationPtr& d, const ScalarSpec& f) {
  return shifted(d, d->scalar(f).value, 1.0, OperatorKind::D_f, "D_f");
}

std::vector<CVector> covariant_derivative(const SpinorField& phi) {
  std::vector<CVector> out;
  for (const auto& nab : phi.disc->nabla) out.emplace_back(nab * phi.coeffs);
  return out;
}

namespace {

CMatrix gram_times(const Discretization& d, const CMatrix& x) {
  if (!d.collocation) return d.gram * x;
  return d.gram.diagonal().asDiagonal() * x;
}

// All eigenpairs of a Hermitian matrix, ascending.
// The divide-and-conquer driver of the system LAPACK returned wrong vectors in testing; MRRR is used.
void hermitian_eigen(CMatrix& a, RVector& values) {
  const auto n = static_cast<lapack_int>(a.rows());
  values.resize(n);
  CMatrix z(n, n);
  std::vector<lapack_int> support(2 * static_cast<std::size_t>(n));
  lapack_int found = 0;
  const lapack_int info = LAPACKE_zheevr(LAPACK_COL_MAJOR, 'V', 'A', 'U', n, a.data(), n, 0.0, 0.0, 0, 0, 0.0,
                                         &found, values.data(), z.data(), n, support.data());
  if (info != 0 || found != n)
    throw NumericalError("eigensolve: Hermitian eigensolver failed (info " + std::to_string(info) + ")");
  a = std::move(z);
}

}  // namespace

double hermiticity_defect(const DiscreteOperator& op) {
  const CMatrix k = gram_times(*op.disc, op.matrix);
  const double scale = std::max(1.0, k.cwiseAbs().maxCoeff());
  return (k - k.adjoint()).cwiseAbs().maxCoeff() / scale;
}

CMatrix witten_operator(const Discretization& d) {
  if (!d.has_h() || !d.has_ambient())
    throw ConfigError(std::string("Witten operator needs ambient data; not available on ") +
                      to_string(d.model.kind));
  CMatrix out = CMatrix::Zero(d.nodes * d.s_amb, d.dim);
  const CMatrix ev = d.eval;
  for (int i = 0; i < d.n; ++i) {
    std::vector<CMatrix> shape, ambient;
    for (int p = 0; p < d.nodes; ++p) {
      CMatrix m = CMatrix::Zero(d.s, d.s);
      for (int j = 0; j < d.n; ++j) m += 0.5 * d.h[p](i, j) * d.tangent[p][j];
      shape.push_back(m);
      ambient.push_back(d.ambient_e[p][i] * d.lift);
    }
    const CMatrix ambient_nabla = d.nabla[i] + pointwise(shape, ev, d.s);
    out += pointwise(ambient, ambient_nabla, d.s);
  }
  return out;
}

double lichnerowicz_residual(const Discretization& d, int band) {
  const CMatrix v = d.band_vectors(band < 0 ? interior_band(d) : band);
  const CMatrix dv = nodal_dirac(d) * v;
  CMatrix form = weighted_form(d, dv, dv, d.s);
  for (const auto& nab : d.nabla) {
    const CMatrix g = nab * v;
    form -= weighted_form(d, g, g, d.s);
  }
  const CMatrix ev = d.eval * v;
  RVector quarter_r = 0.25 * d.R;
  form -= weighted_form(d, ev, identity_blocks(d, quarter_r) * v, d.s);
  return hermitian_norm(form);
}

double witten_identity_residual(const Discretization& d, int band, const AssemblyOptions& opts) {
  const CMatrix v = d.band_vectors(band < 0 ? interior_band(d) : band);
  const double sign = opts.flip_mean_curvature_sign ? -1.0 : 1.0;
  const CMatrix dh = (nodal_dirac(d) - sign * 0.5 * identity_blocks(d, d.H)) * v;
  const CMatrix w = witten_operator(d) * v;
  return hermitian_norm(weighted_form(d, dh, dh, d.s) - weighted_form(d, w, w, d.s_amb));
}

SpectrumResult eigensolve(const DiscreteOperator& op, int count) {
  const Discretization& d = *op.disc;
  if (count < 1 || count > d.dim)
    throw ConfigError("modes.count must lie in [1, " + std::to_string(d.dim) + "]");
  if (hermiticity_defect(op) > 1e-10)
    throw NumericalError("eigensolve: operator " + op.label + " is not self-adjoint in the weighted product");
  // Reduce gram-Hermitian A to a standard Hermitian problem S y = lambda y.
  CMatrix sym;
  RVector root;
  CMatrix lower;
  if (d.collocation) {
    root = d.gram.diagonal().real().cwiseSqrt();
    sym = root.cast<cplx>().asDiagonal() * op.matrix * root.cwiseInverse().cast<cplx>().asDiagonal();
  } else {
    const Eigen::LLT<CMatrix> llt(d.gram);
    if (llt.info() != Eigen::Success) throw NumericalError("eigensolve: Gram matrix is not positive definite");
    lower = llt.matrixL();
    // S = L^{-1} (gram A) L^{-H}, v = L^{-H} y
    sym = lower.triangularView<Eigen::Lower>().solve(d.gram * op.matrix);
    sym = lower.triangularView<Eigen::Lower>().solve(sym.adjoint()).adjoint();
  }
  sym = 0.5 * (sym + sym.adjoint()).eval();
  RVector all;
  hermitian_eigen(sym, all);
  auto to_coefficients = [&](const CMatrix& y) {
    return d.collocation ? CMatrix(root.cwiseInverse().cast<cplx>().asDiagonal() * y)
                         : CMatrix(lower.adjoint().triangularView<Eigen::Upper>().solve(y));
  };

  // Select by |lambda|, then complete every touched cluster so that refinement sees the whole eigenspace.
  const auto total = static_cast<int>(all.size());
  std::vector<int> by_modulus(static_cast<std::size_t>(total));
  std::iota(by_modulus.begin(), by_modulus.end(), 0);
  // |lambda| rounded so that +-pairs tie and the negative member comes first.
  auto modulus_key = [&](int a) { return std::round(std::abs(all(a)) * 1e9); };
  std::stable_sort(by_modulus.begin(), by_modulus.end(), [&](int a, int b) {
    if (modulus_key(a) != modulus_key(b)) return modulus_key(a) < modulus_key(b);
    return all(a) < all(b);
  });
  std::vector<bool> selected(static_cast<std::size_t>(total), false);
  for (int c = 0; c < count; ++c) selected[static_cast<std::size_t>(by_modulus[static_cast<std::size_t>(c)])] = true;

  SpectrumResult out;
  out.values.resize(count);
  CMatrix vecs(d.dim, count);
  int filled = 0;
  int start = 0;  // eigenvalues from LAPACK are ascending
  while (start < total) {
    int stop = start + 1;
    while (stop < total && std::abs(all(stop) - all(start)) < 1e-8 * std::max(1.0, std::abs(all(start)))) ++stop;
    int keep = 0;
    for (int c = start; c < stop; ++c) keep += selected[static_cast<std::size_t>(c)] ? 1 : 0;
    if (keep > 0) {
      const int m = stop - start;
      Eigen::HouseholderQR<CMatrix> qr(sym.middleCols(start, m));
      CMatrix block = to_coefficients(qr.householderQ() * CMatrix::Identity(d.dim, m));
      if (m > 1 && !d.momenta.empty()) {
        // Joint eigenbasis of the commuting momenta, ordered by the mixed momentum.
        CMatrix mix = CMatrix::Zero(m, m);
        double weight = 1.0;
        for (const auto& mom : d.momenta) {
          mix += weight * (block.adjoint() * gram_times(d, mom * block));
          weight *= 0.5 * std::sqrt(3.0);
        }
        mix = 0.5 * (mix + mix.adjoint()).eval();
        Eigen::SelfAdjointEigenSolver<CMatrix> rs(mix);
        block = (block * rs.eigenvectors()).eval();
      }
      std::vector<int> cluster;
      for (int c = 0; c < keep; ++c) {
        out.values(filled) = all(start + c);
        vecs.col(filled) = block.col(c);
        cluster.push_back(filled++);
      }
      out.clusters.push_back(cluster);
    }
    start = stop;
  }

  out.residuals.resize(count);
  for (int c = 0; c < count; ++c) {
    CVector v = vecs.col(c);
    Eigen::Index pivot = 0;
    v.cwiseAbs().maxCoeff(&pivot);
    v *= std::conj(v(pivot)) / std::abs(v(pivot));
    v /= d.norm(v);
    out.residuals(c) = d.norm(op.matrix * v - out.values(c) * v);
    out.vectors.push_back({op.disc, v});
  }
  return out;
}

}  // namespace spinbound
