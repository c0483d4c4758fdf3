#include "spinbound/conformal.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace spinbound {

namespace {

void require_collocation(const Discretization& d, const char* what) {
  if (!d.collocation)
    throw ConfigError(std::string(what) + ": needs a collocation grid (circle, ellipse or torus models)");
}

RVector exp_scaled(const RVector& u, double factor) { return (factor * u.array()).exp().matrix(); }

std::vector<ScalarTerm> search_directions(const Discretization& d, int band) {
  std::vector<ScalarTerm> dirs;
  const ModelKind kind = d.model.kind;
  if (kind == ModelKind::sphere2 || kind == ModelKind::geodesic_sphere_S3) {
    for (int axis = 0; axis < 3; ++axis) dirs.push_back({"coord", 0.0, 0, 0, axis});
    return dirs;
  }
  if (d.n == 1) {
    for (int k = 1; k <= band; ++k) {
      dirs.push_back({"cos", 0.0, k, 0, 0});
      dirs.push_back({"sin", 0.0, k, 0, 0});
    }
    return dirs;
  }
  for (int k1 = 0; k1 <= band; ++k1)
    for (int k2 = -band; k2 <= band; ++k2) {
      if (k1 == 0 && k2 <= 0) continue;
      dirs.push_back({"cos", 0.0, k1, k2, 0});
      dirs.push_back({"sin", 0.0, k1, k2, 0});
    }
  return dirs;
}

template <typename... Args>
std::string fmt(const char* f, Args... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

ScalarSpec with_amplitudes(const std::vector<ScalarTerm>& dirs, const std::vector<double>& a) {
  ScalarSpec out;
  for (std::size_t k = 0; k < dirs.size(); ++k)
    if (a[k] != 0.0) {
      ScalarTerm t = dirs[k];
      t.amplitude = a[k];
      out.terms.push_back(t);
    }
  return out;
}

}  // namespace

ConformalFactor make_conformal_factor(const Discretization& d, const ScalarSpec& u) {
  return {u, d.scalar(u), true};
}

TransformedGeometry transform_geometry(const Discretization& d, const ScalarSpec& u) {
  if (d.n > 2) throw ConfigError("conformal: transformed scalar curvature is only provided for n <= 2");
  const ScalarField f = d.scalar(u);
  TransformedGeometry out;
  out.R_bar_e2u = conformal_scalar(d, f);
  out.q_scale = exp_scaled(f.value, -1.0);
  out.R_bar = out.R_bar_e2u.cwiseProduct(out.q_scale).cwiseProduct(out.q_scale);
  out.H_bar = d.H.cwiseProduct(out.q_scale);
  return out;
}

double conformal_covariance_residual(const DiscretizationPtr& base, const ScalarSpec& u, int band) {
  require_collocation(*base, "conformal_covariance");
  const DiscretizationPtr bar = conformal_transform(base, u);
  const int n = base->n;
  const CMatrix v = base->band_vectors(band < 0 ? std::max(1, base->max_band() / 2) : band);
  const RVector uv = base->scalar(u).value;
  const CMatrix lhs = nodal_dirac(*bar) * scale_rows(exp_scaled(uv, -0.5 * (n - 1)), v, base->s);
  const CMatrix rhs = scale_rows(exp_scaled(uv, -0.5 * (n + 1)), nodal_dirac(*base) * v, base->s);
  double worst = 0.0;
  for (Eigen::Index c = 0; c < v.cols(); ++c)
    worst = std::max(worst, bar->norm(lhs.col(c) - rhs.col(c)) / base->norm(v.col(c)));
  return worst;
}

DiscreteOperator assemble_conformal_dirac(const DiscretizationPtr& base, const ScalarSpec& u, OperatorKind kind,
                                          const ScalarSpec& f) {
  require_collocation(*base, "assemble_conformal_dirac");
  const DiscretizationPtr bar = conformal_transform(base, u);
  switch (kind) {
    case OperatorKind::D: return assemble_intrinsic_dirac(bar);
    case OperatorKind::D_H: return assemble_hypersurface_dirac(bar);
    case OperatorKind::D_f: return assemble_dirac_schrodinger(bar, f);
  }
  return assemble_intrinsic_dirac(bar);
}

BoundReport evaluate_conformal_bounds(TheoremId theorem, const DiscreteOperator& op, double lambda,
                                      const SpinorField& phi, const ScalarSpec& u) {
  if (!theorem_is_conformal(theorem))
    throw ConfigError(std::string("conformal: ") + to_string(theorem) + " is not a conformal theorem");
  return evaluate_bound(theorem, op, lambda, phi, BoundExtras{u});
}

QbarScaling qbar_scaling_residual(const DiscretizationPtr& base, const ScalarSpec& u, const SpinorField& phi) {
  require_collocation(*base, "qbar_scaling");
  const DiscretizationPtr bar = conformal_transform(base, u);
  const RVector uv = base->scalar(u).value;
  const SpinorField psi{bar, scale_rows(exp_scaled(uv, -0.5 * (base->n - 1)), phi.coeffs, base->s)};
  const EMTensorField q = compute_Q(phi);
  const EMTensorField qbar = compute_Q(psi);
  double qmax = 1.0, q2max = 1.0;
  for (int p = 0; p < base->nodes; ++p) {
    qmax = std::max(qmax, q.Q[static_cast<std::size_t>(p)].cwiseAbs().maxCoeff());
    q2max = std::max(q2max, q.frobenius_sq(p));
  }
  QbarScaling out;
  for (int p = 0; p < base->nodes; ++p) {
    if (q.masked[static_cast<std::size_t>(p)] || qbar.masked[static_cast<std::size_t>(p)]) continue;
    const double e = std::exp(-uv(p));
    const RMatrix diff = qbar.Q[static_cast<std::size_t>(p)] - e * q.Q[static_cast<std::size_t>(p)];
    out.tensor_residual = std::max(out.tensor_residual, diff.cwiseAbs().maxCoeff() / qmax);
    out.norm_residual = std::max(out.norm_residual, std::abs(qbar.frobenius_sq(p) - e * e * q.frobenius_sq(p)) / q2max);
  }
  return out;
}

OptimizeResult optimize_u(TheoremId theorem, const DiscreteOperator& op, double lambda, const SpinorField& phi,
                          const OptimizeOptions& opts) {
  if (!theorem_is_conformal(theorem))
    throw ConfigError(std::string("conformal.optimize: ") + to_string(theorem) + " is not a conformal theorem");
  const auto dirs = search_directions(*op.disc, opts.band);
  std::vector<double> amp(dirs.size(), 0.0);
  OptimizeResult out;
  auto objective = [&](const std::vector<double>& a, Status& status) {
    ++out.evaluations;
    const BoundReport r = evaluate_bound(theorem, op, lambda, phi, BoundExtras{with_amplitudes(dirs, a)});
    status = r.status;
    if (r.status == Status::strict || r.status == Status::boundary) return r.rhs;
    return -std::numeric_limits<double>::infinity();
  };
  Status status = Status::not_applicable;
  double best = objective(amp, status);
  out.rhs_initial = best;
  out.status_best = status;
  out.log.push_back(fmt("eval %d rhs %.12g status %s", out.evaluations, best, to_string(status)));
  double step = opts.initial_step;
  while (step >= opts.min_step && !out.budget_exhausted) {
    bool improved = false;
    for (std::size_t k = 0; k < dirs.size() && !out.budget_exhausted; ++k) {
      for (double sgn : {1.0, -1.0}) {
        if (out.evaluations >= opts.budget) {
          out.budget_exhausted = true;
          break;
        }
        std::vector<double> trial = amp;
        trial[k] += sgn * step;
        Status st = Status::not_applicable;
        const double val = objective(trial, st);
        if (val > best + 1e-12) {
          best = val;
          amp = trial;
          out.status_best = st;
          improved = true;
          out.log.push_back(fmt("eval %d accept direction %zu step %+.6g rhs %.12g", out.evaluations, k, sgn * step, best));
          break;
        }
      }
    }
    if (!improved && !out.budget_exhausted) {
      step *= 0.5;
      out.log.push_back(fmt("eval %d step halved to %.6g", out.evaluations, step));
    }
  }
  if (out.budget_exhausted) out.log.push_back(fmt("budget of %d evaluations exhausted", opts.budget));
  out.best = with_amplitudes(dirs, amp);
  out.rhs_best = best;
  return out;
}

ScalarField log_density_factor(const SpinorField& phi) {
  const Discretization& d = *phi.disc;
  if (d.n < 2) throw ConfigError("log_density_factor: needs n >= 2");
  const RVector rho = phi.density();
  const CVector v = phi.nodal();
  const auto grads = covariant_derivative(phi);
  ScalarField out;
  out.value = (rho.array().log() / (d.n - 1)).matrix();
  out.grad.resize(d.nodes, d.n);
  for (int p = 0; p < d.nodes; ++p)
    for (int i = 0; i < d.n; ++i)
      out.grad(p, i) = 2.0 * std::real(v.segment(p * d.s, d.s).dot(grads[static_cast<std::size_t>(i)].segment(p * d.s, d.s))) /
                       (rho(p) * (d.n - 1));
  return out;
}

WEMCheck wem_equality_check(const SpinorField& phi, const ScalarField& u) {
  const Discretization& d = *phi.disc;
  WEMCheck out;
  if (d.n < 2) return out;
  out.status = Status::strict;
  const EMTensorField q = compute_Q(phi);
  const CVector v = phi.nodal();
  const auto grads = covariant_derivative(phi);
  const CVector cdu = clifford_combination(d, v, u.grad);
  double du_acc = 0.0, vol = 0.0, wem_acc = 0.0, mass = 0.0;
  for (int p = 0; p < d.nodes; ++p) {
    const auto seg = v.segment(p * d.s, d.s);
    mass += d.weights(p) * seg.squaredNorm();
    if (q.masked[static_cast<std::size_t>(p)]) continue;
    vol += d.weights(p);
    const double rho = q.density(p);
    for (int i = 0; i < d.n; ++i) {
      const auto gi = grads[static_cast<std::size_t>(i)].segment(p * d.s, d.s);
      const double drho = 2.0 * std::real(seg.dot(gi));
      const double diff = u.grad(p, i) - drho / ((d.n - 1) * rho);
      du_acc += d.weights(p) * diff * diff;
      CVector r = gi - 0.5 * d.tangent[p][i] * cdu.segment(p * d.s, d.s) - 0.5 * d.n * u.grad(p, i) * seg;
      for (int j = 0; j < d.n; ++j) r += q.Q[static_cast<std::size_t>(p)](i, j) * (d.tangent[p][j] * seg);
      wem_acc += d.weights(p) * r.squaredNorm();
    }
  }
  out.du_residual = std::sqrt(du_acc / vol);
  out.wem_residual = std::sqrt(wem_acc / mass);
  return out;
}

}  // namespace spinbound
