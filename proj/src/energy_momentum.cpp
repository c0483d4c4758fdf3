#include "spinbound/energy_momentum.hpp"

#include <algorithm>
#include <cmath>

namespace spinbound {

namespace {

double nodal_norm_sq(const Discretization& d, const CVector& v, int s, const std::vector<bool>* masked) {
  double acc = 0.0;
  for (int p = 0; p < d.nodes; ++p) {
    if (masked && (*masked)[static_cast<std::size_t>(p)]) continue;
    acc += d.weights(p) * v.segment(p * s, s).squaredNorm();
  }
  return acc;
}

}  // namespace

CVector clifford_combination(const Discretization& d, const CVector& nodal_phi, const RMatrix& coeff_per_node) {
  CVector out = CVector::Zero(nodal_phi.size());
  for (int p = 0; p < d.nodes; ++p) {
    CMatrix m = CMatrix::Zero(d.s, d.s);
    for (int j = 0; j < d.n; ++j) m += coeff_per_node(p, j) * d.tangent[p][j];
    out.segment(p * d.s, d.s) = m * nodal_phi.segment(p * d.s, d.s);
  }
  return out;
}

EMTensorField compute_Q(const SpinorField& phi) {
  const Discretization& d = *phi.disc;
  EMTensorField out;
  out.density = phi.density();
  const double peak = out.density.maxCoeff();
  if (!(peak > 0.0)) throw NumericalError("compute_Q: spinor field vanishes identically");
  const CVector v = phi.nodal();
  const auto grads = covariant_derivative(phi);
  out.Q.assign(static_cast<std::size_t>(d.nodes), RMatrix::Zero(d.n, d.n));
  out.masked.assign(static_cast<std::size_t>(d.nodes), false);
  for (int p = 0; p < d.nodes; ++p) {
    const double rho = out.density(p);
    if (rho < kZeroSetRelative * peak) {
      out.masked[static_cast<std::size_t>(p)] = true;
      ++out.masked_count;
      continue;
    }
    const auto seg = v.segment(p * d.s, d.s);
    // a(i, j) = Re(e_i . nu . nabla_j phi, phi)
    RMatrix a(d.n, d.n);
    for (int i = 0; i < d.n; ++i)
      for (int j = 0; j < d.n; ++j)
        a(i, j) = std::real(seg.dot(d.tangent[p][i] * grads[j].segment(p * d.s, d.s)));
    out.Q[static_cast<std::size_t>(p)] = 0.5 * (a + a.transpose()) / rho;
  }
  out.mask_warning = 2 * out.masked_count > d.nodes;
  return out;
}

double trace_identity_residual(const SpinorField& phi, const EMTensorField& q) {
  const Discretization& d = *phi.disc;
  const CVector v = phi.nodal();
  const CVector dv = nodal_dirac(d) * phi.coeffs;
  double worst = 0.0;
  for (int p = 0; p < d.nodes; ++p) {
    if (q.masked[static_cast<std::size_t>(p)]) continue;
    const double rhs = std::real(v.segment(p * d.s, d.s).dot(dv.segment(p * d.s, d.s)));
    worst = std::max(worst, std::abs(q.trace(p) * q.density(p) - rhs));
  }
  return worst;
}

EMSpinorCheck em_spinor_residual(const SpinorField& phi, const EMTensorField& q) {
  const Discretization& d = *phi.disc;
  const CVector v = phi.nodal();
  const auto grads = covariant_derivative(phi);
  double acc = 0.0;
  RMatrix row(d.nodes, d.n);
  for (int i = 0; i < d.n; ++i) {
    for (int p = 0; p < d.nodes; ++p) row.row(p) = q.Q[static_cast<std::size_t>(p)].row(i);
    const CVector r = grads[static_cast<std::size_t>(i)] + clifford_combination(d, v, row);
    acc += nodal_norm_sq(d, r, d.s, &q.masked);
  }
  EMSpinorCheck out;
  out.residual = std::sqrt(acc / nodal_norm_sq(d, v, d.s, nullptr));
  double lo = 1e300, hi = -1e300, scale = 1.0;
  for (int p = 0; p < d.nodes; ++p) {
    if (q.masked[static_cast<std::size_t>(p)]) continue;
    lo = std::min(lo, q.trace(p));
    hi = std::max(hi, q.trace(p));
    scale = std::max(scale, std::abs(q.trace(p)));
  }
  out.trace_spread = hi - lo;
  out.t_killing = out.residual < kEMCertification && out.trace_spread < 1e-6 * scale;
  return out;
}

QtrCheck qtr_identity_residual(const SpinorField& phi, const EMTensorField& q) {
  QtrCheck out;
  if (em_spinor_residual(phi, q).residual >= kEMCertification) return out;
  const Discretization& d = *phi.disc;
  out.status = Status::strict;
  for (int p = 0; p < d.nodes; ++p) {
    if (q.masked[static_cast<std::size_t>(p)]) continue;
    const double t = q.trace(p);
    out.residual = std::max(out.residual, std::abs(t * t - 0.25 * d.R(p) - q.frobenius_sq(p)));
  }
  return out;
}

}  // namespace spinbound
