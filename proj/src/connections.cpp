#include "spinbound/connections.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace spinbound {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

Status aggregate(bool any_violated, bool any_boundary) {
  if (any_violated) return Status::violated;
  if (any_boundary) return Status::boundary;
  return Status::strict;
}

ModifiedDerivative apply(const SpinorField& phi, const ConnectionParams& params, const EMTensorField* q) {
  const Discretization& d = *phi.disc;
  const CVector v = phi.nodal();
  const auto grads = covariant_derivative(phi);
  ModifiedDerivative out;
  double acc = 0.0, total = 0.0;
  for (int p = 0; p < d.nodes; ++p) total += d.weights(p) * v.segment(p * d.s, d.s).squaredNorm();
  for (int i = 0; i < d.n; ++i) {
    CVector r = grads[static_cast<std::size_t>(i)];
    for (int p = 0; p < d.nodes; ++p) {
      auto seg = r.segment(p * d.s, d.s);
      if (!params.defined[static_cast<std::size_t>(p)]) {
        seg.setZero();
        continue;
      }
      CMatrix m = params.shift(p) * d.tangent[p][i];
      if (q)
        for (int j = 0; j < d.n; ++j) m += q->Q[static_cast<std::size_t>(p)](i, j) * d.tangent[p][j];
      seg += m * v.segment(p * d.s, d.s);
      acc += d.weights(p) * seg.squaredNorm();
    }
    out.fields.push_back(std::move(r));
  }
  out.norm = std::sqrt(acc / total);
  return out;
}

}  // namespace

ConnectionParams make_params(const RVector& p, const RVector& q, double lambda, const RVector& background) {
  ConnectionParams out;
  out.p = p;
  out.q = q;
  out.lambda = lambda;
  out.background = background;
  out.shift = (0.5 * p.array() * background.array() + lambda * q.array()).matrix();
  out.defined.assign(static_cast<std::size_t>(p.size()), true);
  out.status = Status::strict;
  return out;
}

ConnectionParams pq_thm1(const Discretization& d, const EMTensorField& q, double lambda, const RVector& background,
                         const RVector* scalar) {
  const RVector& s_field = scalar ? *scalar : d.R;
  ConnectionParams out;
  out.lambda = lambda;
  out.background = background;
  out.p = out.q = out.shift = RVector::Constant(d.nodes, kNaN);
  out.defined.assign(static_cast<std::size_t>(d.nodes), false);
  bool violated = false, boundary = false;
  for (int p = 0; p < d.nodes; ++p) {
    if (q.masked[static_cast<std::size_t>(p)]) continue;
    const double a = s_field(p) + 4.0 * q.frobenius_sq(p);
    const double b = std::abs(background(p));
    if (b < kZeroBackground) {
      // q = 0 branch: only S + 4|Q|^2 > 0 is needed.
      const double tol = kHypothesisRelative * std::max(1.0, std::abs(a));
      if (a < -tol) violated = true;
      else if (a <= tol) boundary = true;
      else {
        out.p(p) = out.q(p) = out.shift(p) = 0.0;
        out.defined[static_cast<std::size_t>(p)] = true;
      }
      continue;
    }
    const double diff = a - b * b;
    const double tol = kHypothesisRelative * std::max({1.0, std::abs(a), b * b});
    if (diff < -tol) {
      violated = true;
    } else if (diff <= tol) {
      boundary = true;
    } else {
      const double nq2 = b / (std::sqrt(a) - b);
      const double qq = std::sqrt(nq2 / d.n);
      out.q(p) = qq;
      out.p(p) = -1.0 / (d.n * qq);
      out.shift(p) = 0.5 * out.p(p) * background(p) + qq * lambda;
      out.defined[static_cast<std::size_t>(p)] = true;
    }
  }
  out.status = aggregate(violated, boundary);
  return out;
}

ConnectionParams pq_zhang(const Discretization& d, double lambda, const RVector& background, const RVector* scalar,
                          const std::vector<bool>* masked) {
  ConnectionParams out;
  out.lambda = lambda;
  out.background = background;
  out.p = out.q = out.shift = out.predicted_shift = RVector::Constant(d.nodes, kNaN);
  out.defined.assign(static_cast<std::size_t>(d.nodes), false);
  if (d.n < 2) {
    out.status = Status::not_applicable;
    return out;
  }
  const RVector& s_field = scalar ? *scalar : d.R;
  const double n = d.n;
  bool violated = false, boundary = false;
  for (int p = 0; p < d.nodes; ++p) {
    if (masked && (*masked)[static_cast<std::size_t>(p)]) continue;
    const double a = n * s_field(p) / (n - 1.0);
    const double b = std::abs(background(p));
    const double lambda_sign = lambda > 0 ? 1.0 : (lambda < 0 ? -1.0 : 0.0);
    if (a > 0) out.predicted_shift(p) = lambda_sign / (2.0 * n) * std::sqrt(a);
    const double tol = kHypothesisRelative * std::max({1.0, std::abs(a), b * b});
    if (b < kZeroBackground || a - b * b < -tol) {
      violated = true;
    } else if (a - b * b <= tol) {
      boundary = true;
    } else {
      const double one_minus_nq = std::sqrt((n - 1.0) * b / (std::sqrt(a) - b));
      const double qq = (1.0 - one_minus_nq) / n;
      out.q(p) = qq;
      out.p(p) = (1.0 - qq) / one_minus_nq;
      out.shift(p) = 0.5 * out.p(p) * background(p) + qq * lambda;
      out.defined[static_cast<std::size_t>(p)] = true;
    }
  }
  out.status = aggregate(violated, boundary);
  return out;
}

ModifiedDerivative nabla_Q_apply(const SpinorField& phi, const ConnectionParams& params, const EMTensorField& q) {
  return apply(phi, params, &q);
}

ModifiedDerivative nabla_lambda_apply(const SpinorField& phi, const ConnectionParams& params) {
  return apply(phi, params, nullptr);
}

double qformula_residual(const SpinorField& phi, const ConnectionParams& params, const EMTensorField& q) {
  const Discretization& d = *phi.disc;
  const ModifiedDerivative mod = nabla_Q_apply(phi, params, q);
  const auto grads = covariant_derivative(phi);
  const double peak = q.density.maxCoeff();
  double worst = 0.0;
  for (int p = 0; p < d.nodes; ++p) {
    if (!params.defined[static_cast<std::size_t>(p)] || q.masked[static_cast<std::size_t>(p)]) continue;
    double lhs = 0.0, grad_sq = 0.0;
    for (int i = 0; i < d.n; ++i) {
      lhs += mod.fields[static_cast<std::size_t>(i)].segment(p * d.s, d.s).squaredNorm();
      grad_sq += grads[static_cast<std::size_t>(i)].segment(p * d.s, d.s).squaredNorm();
    }
    const double s = params.shift(p);
    const double rhs = grad_sq + (d.n * s * s - q.frobenius_sq(p)) * q.density(p);
    worst = std::max(worst, std::abs(lhs - rhs));
  }
  return worst / peak;
}

double integral_identity_residual(const SpinorField& phi, const ConnectionParams& params, const EMTensorField& q) {
  const Discretization& d = *phi.disc;
  const ModifiedDerivative mod = nabla_Q_apply(phi, params, q);
  double lhs = 0.0, rhs = 0.0, mass = 0.0;
  const double lam2 = params.lambda * params.lambda;
  for (int p = 0; p < d.nodes; ++p) {
    mass += d.weights(p) * q.density(p);
    if (!params.defined[static_cast<std::size_t>(p)]) continue;
    for (int i = 0; i < d.n; ++i)
      lhs += d.weights(p) * mod.fields[static_cast<std::size_t>(i)].segment(p * d.s, d.s).squaredNorm();
    const double gap = std::sqrt(d.R(p) + 4.0 * q.frobenius_sq(p)) - std::abs(params.background(p));
    const double qq = params.q(p);
    rhs += d.weights(p) * (1.0 + d.n * qq * qq) * (lam2 - 0.25 * gap * gap) * q.density(p);
  }
  return std::abs(lhs - rhs) / mass;
}

}  // namespace spinbound
