#include "spinbound/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace spinbound {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Family { einstein_free, einstein, friedrich, hijazi };

Family family(TheoremId t) {
  switch (t) {
    case TheoremId::thm1_1:
    case TheoremId::thm1_2:
    case TheoremId::df_prop2:
    case TheoremId::df_prop3: return Family::einstein_free;
    case TheoremId::zhang4_1:
    case TheoremId::hijazi_zhang6_1:
    case TheoremId::df_prop1: return Family::einstein;
    case TheoremId::friedrich: return Family::friedrich;
    case TheoremId::hijazi_em: return Family::hijazi;
  }
  return Family::hijazi;
}

double sign_of(double x) { return x > 0 ? 1.0 : (x < 0 ? -1.0 : 0.0); }

// Relative L2 norm of nabla_i phi - 1/2 e_i.du.phi - (n/2) du_i phi + s e_i.nu.phi [+ sum_j Q_ij e_j.nu.phi].
double conformal_bracket(const SpinorField& phi, const ConnectionParams& params, const ScalarField& u,
                         const EMTensorField* q) {
  const Discretization& d = *phi.disc;
  const CVector v = phi.nodal();
  const auto grads = covariant_derivative(phi);
  const CVector cdu = clifford_combination(d, v, u.grad);
  double acc = 0.0, total = 0.0;
  for (int p = 0; p < d.nodes; ++p) {
    const auto seg = v.segment(p * d.s, d.s);
    total += d.weights(p) * seg.squaredNorm();
    if (!params.defined[static_cast<std::size_t>(p)]) continue;
    for (int i = 0; i < d.n; ++i) {
      CMatrix m = params.shift(p) * d.tangent[p][i];
      if (q)
        for (int j = 0; j < d.n; ++j) m += q->Q[static_cast<std::size_t>(p)](i, j) * d.tangent[p][j];
      const CVector r = grads[static_cast<std::size_t>(i)].segment(p * d.s, d.s) -
                        0.5 * d.tangent[p][i] * cdu.segment(p * d.s, d.s) - 0.5 * d.n * u.grad(p, i) * seg +
                        m * seg;
      acc += d.weights(p) * r.squaredNorm();
    }
  }
  return std::sqrt(acc / total);
}

ScalarField zero_field(const Discretization& d) {
  return {RVector::Zero(d.nodes), RMatrix::Zero(d.nodes, d.n), RVector::Zero(d.nodes)};
}

}  // namespace

const char* to_string(TheoremId t) {
  switch (t) {
    case TheoremId::thm1_1: return "thm1_1";
    case TheoremId::thm1_2: return "thm1_2";
    case TheoremId::zhang4_1: return "zhang4_1";
    case TheoremId::hijazi_zhang6_1: return "hijazi_zhang6_1";
    case TheoremId::friedrich: return "friedrich";
    case TheoremId::hijazi_em: return "hijazi_em";
    case TheoremId::df_prop1: return "df_prop1";
    case TheoremId::df_prop2: return "df_prop2";
    case TheoremId::df_prop3: return "df_prop3";
  }
  return "unknown";
}

const std::vector<TheoremId>& all_theorems() {
  static const std::vector<TheoremId> ids = {TheoremId::thm1_1,   TheoremId::thm1_2,    TheoremId::zhang4_1,
                                             TheoremId::hijazi_zhang6_1, TheoremId::friedrich, TheoremId::hijazi_em,
                                             TheoremId::df_prop1, TheoremId::df_prop2,  TheoremId::df_prop3};
  return ids;
}

TheoremId theorem_from_string(const std::string& s) {
  for (TheoremId t : all_theorems())
    if (s == to_string(t)) return t;
  throw ConfigError("checks: unknown theorem id '" + s + "'");
}

OperatorKind theorem_operator(TheoremId t) {
  switch (t) {
    case TheoremId::friedrich:
    case TheoremId::hijazi_em: return OperatorKind::D;
    case TheoremId::df_prop1:
    case TheoremId::df_prop2:
    case TheoremId::df_prop3: return OperatorKind::D_f;
    default: return OperatorKind::D_H;
  }
}

bool theorem_is_conformal(TheoremId t) {
  return t == TheoremId::thm1_2 || t == TheoremId::hijazi_zhang6_1 || t == TheoremId::df_prop3;
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::not_applicable: return "not_applicable";
  }
  return "unknown";
}

Verdict BoundReport::equality_consistency() const {
  if (!residual) return Verdict::not_applicable;
  return equality == (*residual < kParallelResidual) ? Verdict::pass : Verdict::fail;
}

RVector conformal_scalar(const Discretization& d, const ScalarField& u) {
  const double n = d.n;
  if (d.n == 1) return RVector::Zero(d.nodes);
  RVector out(d.nodes);
  for (int p = 0; p < d.nodes; ++p)
    out(p) = d.R(p) - 2.0 * (n - 1.0) * u.laplacian(p) - (n - 2.0) * (n - 1.0) * u.grad.row(p).squaredNorm();
  return out;
}

double killing_residual(const SpinorField& phi, double mu) {
  const Discretization& d = *phi.disc;
  ConnectionParams params =
      make_params(RVector::Zero(d.nodes), RVector::Constant(d.nodes, 1.0 / d.n), mu, RVector::Zero(d.nodes));
  return nabla_lambda_apply(phi, params).norm;
}

BoundReport evaluate_bound(TheoremId theorem, const DiscreteOperator& op, double lambda, const SpinorField& phi,
                           const BoundExtras& extras) {
  if (op.kind != theorem_operator(theorem))
    throw ConfigError(std::string("checks: ") + to_string(theorem) + " is stated for " +
                      to_string(theorem_operator(theorem)) + ", but the scenario operator is " + to_string(op.kind));
  const Discretization& d = *op.disc;
  const double n = d.n;
  BoundReport r;
  r.theorem = theorem;
  r.lambda = lambda;
  r.lambda_sq = lambda * lambda;
  const RVector& b = op.background;
  r.background_min = b.minCoeff();
  r.background_max = b.maxCoeff();
  r.background_constant = r.background_max - r.background_min < 1e-10 * std::max(1.0, std::abs(r.background_max));

  const EMTensorField q = compute_Q(phi);
  r.mask_fraction = q.mask_fraction();
  r.em_residual = em_spinor_residual(phi, q).residual;

  const bool conformal = theorem_is_conformal(theorem);
  const ScalarField u = conformal && extras.u ? d.scalar(*extras.u) : zero_field(d);
  const RVector scal = conformal ? conformal_scalar(d, u) : d.R;

  double inf_value = kInf;
  switch (family(theorem)) {
    case Family::einstein_free: {
      const ConnectionParams params = pq_thm1(d, q, lambda, b, &scal);
      r.status = params.status;
      for (int p = 0; p < d.nodes; ++p) {
        if (q.masked[static_cast<std::size_t>(p)]) continue;
        const double gap = std::sqrt(std::max(0.0, scal(p) + 4.0 * q.frobenius_sq(p))) - std::abs(b(p));
        inf_value = std::min(inf_value, 0.25 * gap * gap);
      }
      if (r.status == Status::strict) {
        r.residual_kind = conformal ? "conformal_nabla_Q" : "nabla_Q";
        r.residual = conformal ? conformal_bracket(phi, params, u, &q) : nabla_Q_apply(phi, params, q).norm;
      }
      break;
    }
    case Family::einstein: {
      if (d.n < 2) {
        r.status = Status::not_applicable;
        return r;
      }
      const ConnectionParams params = pq_zhang(d, lambda, b, &scal, &q.masked);
      r.status = params.status;
      for (int p = 0; p < d.nodes; ++p) {
        if (q.masked[static_cast<std::size_t>(p)]) continue;
        const double gap = std::sqrt(std::max(0.0, n * scal(p) / (n - 1.0))) - std::abs(b(p));
        inf_value = std::min(inf_value, 0.25 * gap * gap);
      }
      if (r.status == Status::strict) {
        r.residual_kind = conformal ? "conformal_nabla_lambda" : "nabla_lambda";
        r.residual = conformal ? conformal_bracket(phi, params, u, nullptr) : nabla_lambda_apply(phi, params).norm;
      }
      break;
    }
    case Family::friedrich: {
      if (d.n < 2 || d.R.minCoeff() <= 0.0) {
        r.status = Status::not_applicable;
        return r;
      }
      r.status = Status::strict;
      inf_value = n / (4.0 * (n - 1.0)) * d.R.minCoeff();
      r.residual_kind = "killing";
      r.residual = killing_residual(phi, lambda);
      break;
    }
    case Family::hijazi: {
      r.status = Status::strict;
      for (int p = 0; p < d.nodes; ++p) {
        if (q.masked[static_cast<std::size_t>(p)]) continue;
        inf_value = std::min(inf_value, 0.25 * d.R(p) + q.frobenius_sq(p));
      }
      r.residual_kind = "em_spinor";
      r.residual = r.em_residual;
      break;
    }
  }
  r.rhs = inf_value;
  r.margin = r.lambda_sq - r.rhs;
  r.equality = std::abs(r.margin) < kEqualityRelative * std::max(1.0, r.lambda_sq);
  r.sign = sign_diagnostics(r);
  return r;
}

Verdict sign_diagnostics(const BoundReport& report) {
  if (!report.equality || report.status != Status::strict) return Verdict::not_applicable;
  const bool positive = report.background_min > 0, negative = report.background_max < 0;
  if (!(positive || negative) || std::abs(report.lambda) < 1e-8) return Verdict::not_applicable;
  return sign_of(report.lambda) == (positive ? 1.0 : -1.0) ? Verdict::pass : Verdict::fail;
}

ImprovementRecord improvement_comparison(const DiscreteOperator& op, double lambda, const SpinorField& phi) {
  ImprovementRecord out;
  const BoundReport thm = evaluate_bound(TheoremId::thm1_1, op, lambda, phi);
  const BoundReport zh = evaluate_bound(TheoremId::zhang4_1, op, lambda, phi);
  out.thm1_status = thm.status;
  out.zhang_status = zh.status;
  out.rhs_thm1 = thm.rhs;
  out.rhs_zhang = zh.rhs;
  const double mu = lambda + 0.5 * op.background.mean();
  out.killing_residual = killing_residual(phi, mu);
  out.killing = out.killing_residual < kParallelResidual && thm.background_constant;
  if (out.killing) out.bounds_agree = std::abs(out.rhs_thm1 - out.rhs_zhang) < 1e-7;
  return out;
}

}  // namespace spinbound
