#include "spinbound/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "spinbound/conformal.hpp"

namespace spinbound {

namespace {

constexpr double kPi = std::numbers::pi;

struct Table {
  std::string suite;
  std::vector<VerifyRow>& rows;

  void below(const std::string& name, double value, double tol) {
    rows.push_back({suite, name, value, tol, false, std::isfinite(value) && value < tol});
  }
  void above(const std::string& name, double value, double min) {
    rows.push_back({suite, name, value, min, true, std::isfinite(value) && value >= min});
  }
  void flag(const std::string& name, bool ok) { rows.push_back({suite, name, ok ? 1.0 : 0.0, 1.0, true, ok}); }
};

double max_abs(const CMatrix& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

GammaSet negated(GammaSet g) {
  for (auto& m : g.generators) m = -m;
  return g;
}

/// Distance between computed eigenvalues and a target multiset (both sorted).
double multiset_error(std::vector<double> got, std::vector<double> want) {
  if (got.size() != want.size()) return std::numeric_limits<double>::infinity();
  std::sort(got.begin(), got.end());
  std::sort(want.begin(), want.end());
  double e = 0.0;
  for (std::size_t i = 0; i < got.size(); ++i) e = std::max(e, std::abs(got[i] - want[i]));
  return e;
}

std::vector<double> values_of(const SpectrumResult& s) { return {s.values.data(), s.values.data() + s.values.size()}; }

void algebra(Table t) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g;
  for (int n = 1; n <= 6; ++n) {
    const GammaSet G = build_gamma(n);
    t.below("gamma n=" + std::to_string(n) + " relations", clifford_relation_defect(G), 1e-12);
    const CMatrix w = volume_element(G);
    t.below("gamma n=" + std::to_string(n) + " omega^2 = 1", max_abs(w * w - G.identity()), 1e-12);
    if (n % 2 == 1) t.below("gamma n=" + std::to_string(n) + " omega = 1", max_abs(w - G.identity()), 1e-12);
    double metric = 0.0;
    for (int k = 0; k < 200; ++k) {
      std::vector<double> x(static_cast<std::size_t>(n)), y(static_cast<std::size_t>(n));
      for (auto& v : x) v = g(rng);
      for (auto& v : y) v = g(rng);
      CVector phi(G.dim_spinor);
      for (auto& c : phi) c = {g(rng), g(rng)};
      double xy = 0.0;
      for (int i = 0; i < n; ++i) xy += x[static_cast<std::size_t>(i)] * y[static_cast<std::size_t>(i)];
      const cplx lhs = (G.vector_action(y) * phi).dot(G.vector_action(x) * phi);
      metric = std::max(metric, std::abs(std::real(lhs) - xy * phi.squaredNorm()));
      metric = std::max(metric, std::abs(std::real(phi.dot(G.vector_action(x) * phi))));
    }
    t.below("gamma n=" + std::to_string(n) + " metric compatibility", metric, 1e-12);
    // 1-forms and 2-forms are skew: (tau phi, psi) = -(phi, tau psi).
    double skew = 0.0;
    for (int k = 0; k < 200; ++k) {
      std::vector<double> x(static_cast<std::size_t>(n)), y(static_cast<std::size_t>(n));
      for (auto& v : x) v = g(rng);
      for (auto& v : y) v = g(rng);
      CVector phi(G.dim_spinor), psi(G.dim_spinor);
      for (auto& c : phi) c = {g(rng), g(rng)};
      for (auto& c : psi) c = {g(rng), g(rng)};
      double xy = 0.0;
      for (int i = 0; i < n; ++i) xy += x[static_cast<std::size_t>(i)] * y[static_cast<std::size_t>(i)];
      const CMatrix one = G.vector_action(x);
      const CMatrix two = one * G.vector_action(y) + xy * G.identity();
      for (const CMatrix* tau : {&one, &two})
        skew = std::max(skew, std::abs(psi.dot(*tau * phi) + (*tau * psi).dot(phi)));
    }
    t.below("gamma n=" + std::to_string(n) + " forms skew-adjoint", skew, 1e-12);
  }
  for (int m = 0; m <= 1; ++m) {
    const GammaSet amb = build_gamma(2 * m + 2);
    GammaSet a = alpha_embed(amb);
    t.below("alpha(omega_" + std::to_string(2 * m + 1) + ") = omega_" + std::to_string(2 * m + 2),
            max_abs(volume_element(a) - volume_element(amb)), 1e-12);
  }
  const auto u2 = find_intertwiner(build_gamma(2), alpha_embed(build_gamma(3)));
  t.flag("intertwiner n=2 found", u2.has_value());
  const ChiralitySplit s4 = chirality_split(build_gamma(4));
  const GammaSet r3 = restrict_to(alpha_embed(build_gamma(4)), s4.projector_plus);
  t.flag("intertwiner n=3 (S+) found", find_intertwiner(build_gamma(3), r3).has_value());
  t.flag("inequivalent irreps rejected", !find_intertwiner(build_gamma(3), negated(build_gamma(3))).has_value());
  for (int amb_n : {3, 4}) {
    const GammaSet amb = build_gamma(amb_n);
    const ChiralitySplit s = chirality_split(amb);
    const CMatrix id = amb.identity();
    double e = max_abs(s.projector_plus + s.projector_minus - id);
    e = std::max(e, max_abs(s.projector_plus * s.projector_plus - s.projector_plus));
    e = std::max(e, max_abs(s.projector_plus * s.projector_minus));
    e = std::max(e, max_abs(s.defining_operator * s.defining_operator - id));
    t.below("chirality projectors ambient " + std::to_string(amb_n), e, 1e-12);
    const GammaSet tan = alpha_embed(amb);
    double c = 0.0;
    for (const auto& h : tan.generators)
      c = std::max(c, amb_n % 2 == 1 ? max_abs(h * s.defining_operator + s.defining_operator * h)
                                     : max_abs(h * s.defining_operator - s.defining_operator * h));
    t.below(amb_n % 2 == 1 ? "tangent action swaps S+/S- (n=2)" : "tangent action preserves S+/S- (n=3)", c, 1e-12);
  }
}

void geometry(Table t) {
  const auto circle = make_model(ModelKind::circle, {1.0});
  const auto ellipse = make_model(ModelKind::ellipse, {2.0, 1.0});
  const auto sphere = make_model(ModelKind::sphere2, {1.0});
  for (const auto* m : {&circle, &ellipse, &sphere}) {
    const double r = gauss_formula_residual(*m, 128).value_or(INFINITY);
    t.below(m->describe() + " Gauss formula (N=128)", r, 1e-2);
  }
  const double r1 = *gauss_formula_residual(ellipse, 64), r2 = *gauss_formula_residual(ellipse, 128);
  t.above("ellipse(2,1) Gauss formula convergence ratio", r1 / r2, 3.5);
  const auto ds = discretize(sphere, 12);
  t.below("sphere2(1) H = 2, R = 2", std::max((ds->H.array() - 2).abs().maxCoeff(), (ds->R.array() - 2).abs().maxCoeff()),
          1e-12);
  const double rho = kPi / 3;
  const auto dg = discretize(make_model(ModelKind::geodesic_sphere_S3, {rho}), 8);
  const double h3 = 2 * std::cos(rho) / std::sin(rho), r3 = 2 / (std::sin(rho) * std::sin(rho));
  t.below("geodesic sphere H = 2 cot rho, R = 2/sin^2 rho",
          std::max((dg->H.array() - h3).abs().maxCoeff(), (dg->R.array() - r3).abs().maxCoeff()), 1e-10);
  const auto de = discretize(ellipse, 256);
  double turning = 0.0;
  for (int p = 0; p < de->nodes; ++p) turning += de->weights(p) * de->H(p);
  t.below("ellipse total curvature = 2 pi", std::abs(turning - 2 * kPi), 1e-10);
  double perim = de->weights.sum();
  t.below("ellipse perimeter", std::abs(perim - ellipse_perimeter(2.0, 1.0)), 1e-10);
}

void operators(Table t, const AssemblyOptions& opts) {
  const auto c = discretize(make_model(ModelKind::circle, {1.0}), 64);
  const auto cd = eigensolve(assemble_intrinsic_dirac(c), 10);
  std::vector<double> want;
  for (int k = 0; k < 5; ++k) {
    want.push_back(k + 0.5);
    want.push_back(-(k + 0.5));
  }
  t.below("circle(1) spec D = +-(k+1/2)", multiset_error(values_of(cd), want), 1e-10);
  const auto chop = assemble_hypersurface_dirac(c, opts);
  const auto ch = eigensolve(chop, 9);
  std::vector<double> want_h;
  for (int k = -4; k <= 4; ++k) want_h.push_back(k);
  t.below("circle(1) spec D_H = spec D - 1/2", multiset_error(values_of(ch), want_h), 1e-10);

  const auto s = discretize(make_model(ModelKind::sphere2, {1.0}), 12);
  const auto sd = eigensolve(assemble_intrinsic_dirac(s), 84);
  std::vector<double> want_s;
  for (int k = 0; k <= 5; ++k)
    for (int m = 0; m < 2 * (k + 1); ++m) {
      want_s.push_back(k + 1.0);
      want_s.push_back(-(k + 1.0));
    }
  t.below("sphere2(1) spec D = +-(k+1), mult 2(k+1), k <= 5", multiset_error(values_of(sd), want_s), 1e-8);
  const auto sh = eigensolve(assemble_hypersurface_dirac(s, opts), 2);
  t.below("sphere2(1) D_H kernel (dim 2)", std::max(std::abs(sh.values(0)), std::abs(sh.values(1))), 1e-8);

  for (double rho : {kPi / 4, kPi / 3}) {
    const auto g = discretize(make_model(ModelKind::geodesic_sphere_S3, {rho}), 10);
    const auto gh = eigensolve(assemble_hypersurface_dirac(g, opts), 2);
    t.below("geodesic sphere rho=" + std::to_string(rho) + " lambda_1(D_H) = tan(rho/2)",
            std::abs(std::abs(gh.values(0)) - std::tan(rho / 2)), 1e-8);
    t.below("geodesic sphere rho=" + std::to_string(rho) + " Witten identity", witten_identity_residual(*g, -1, opts),
            1e-8);
  }
  const auto tor = discretize(make_model(ModelKind::flat_torus2, {}), 15);
  const auto td2 = eigensolve(assemble_intrinsic_dirac(tor), 18);
  std::vector<double> want_t = {0, 0};
  for (double v : {1.0, std::sqrt(2.0)})
    for (int m = 0; m < 4; ++m) {
      want_t.push_back(v);
      want_t.push_back(-v);
    }
  t.below("flat torus spec D = {0 x2, +-1 x4, +-sqrt2 x4}", multiset_error(values_of(td2), want_t), 1e-10);

  t.below("circle(1) Lichnerowicz", lichnerowicz_residual(*c), 1e-8);
  t.below("sphere2(1) Lichnerowicz", lichnerowicz_residual(*s), 1e-8);
  t.below("flat torus Lichnerowicz", lichnerowicz_residual(*tor), 1e-8);
  t.below("circle(1) Witten identity", witten_identity_residual(*c, -1, opts), 1e-8);
  t.below("sphere2(1) Witten identity", witten_identity_residual(*s, -1, opts), 1e-8);
  t.below("circle(1) D_H self-adjoint", hermiticity_defect(chop), 1e-10);
  const auto e = discretize(make_model(ModelKind::ellipse, {2.0, 1.0}), 256);
  t.below("ellipse(2,1) D_H self-adjoint", hermiticity_defect(assemble_hypersurface_dirac(e, opts)), 1e-10);
}

struct SweepCase {
  std::string label;
  DiscreteOperator op;
  std::vector<TheoremId> theorems;
};

void bounds(Table t, const AssemblyOptions& opts) {
  std::vector<std::pair<std::string, DiscretizationPtr>> models = {
      {"circle(1)", discretize(make_model(ModelKind::circle, {1.0}), 64)},
      {"ellipse(2,1)", discretize(make_model(ModelKind::ellipse, {2.0, 1.0}), 256)},
      {"sphere2(1)", discretize(make_model(ModelKind::sphere2, {1.0}), 12)},
      {"S3(pi/4)", discretize(make_model(ModelKind::geodesic_sphere_S3, {kPi / 4}), 10)},
      {"S3(pi/3)", discretize(make_model(ModelKind::geodesic_sphere_S3, {kPi / 3}), 10)},
      {"flat_torus2", discretize(make_model(ModelKind::flat_torus2, {}), 15)},
      {"conformal_torus2", discretize(make_model(ModelKind::conformal_torus2, {}), 21)}};
  using T = TheoremId;
  for (const auto& [label, d] : models) {
    std::vector<SweepCase> cases;
    cases.push_back({label + " D", assemble_intrinsic_dirac(d), {T::friedrich, T::hijazi_em}});
    if (d->has_h())
      cases.push_back({label + " D_H", assemble_hypersurface_dirac(d, opts),
                       {T::thm1_1, T::zhang4_1, T::thm1_2, T::hijazi_zhang6_1}});
    cases.push_back(
        {label + " D_f(f=1)", assemble_dirac_schrodinger(d, ScalarSpec::constant(1.0)), {T::df_prop1, T::df_prop2, T::df_prop3}});
    for (const auto& c : cases) {
      const SpectrumResult sp = eigensolve(c.op, 12);
      double worst = INFINITY;
      int consistency_failures = 0, evaluated = 0;
      for (int i = 0; i < 12; ++i) {
        if (sp.residuals(i) > 1e-8 * std::max(1.0, std::abs(sp.values(i)))) continue;
        for (T th : c.theorems) {
          const BoundReport r = evaluate_bound(th, c.op, sp.values(i), sp.vectors[static_cast<std::size_t>(i)]);
          if (r.status != Status::strict && r.status != Status::boundary) continue;
          ++evaluated;
          worst = std::min(worst, r.margin);
          consistency_failures += r.equality_consistency() == Verdict::fail;
        }
      }
      if (evaluated > 0) t.above(c.label + " min margin (" + std::to_string(evaluated) + " evals)", worst, -1e-7);
      t.below(c.label + " equality <-> parallel mismatches", consistency_failures, 0.5);
    }
  }
  // Equality cases with closed forms.
  const auto& circle = models[0].second;
  const auto ch = assemble_hypersurface_dirac(circle, opts);
  const auto sp = eigensolve(ch, 7);
  double eq = 0.0;
  for (int i = 0; i < 7; ++i) {
    const double lam = sp.values(i);
    if (lam < 0.5) continue;
    const BoundReport r = evaluate_bound(T::thm1_1, ch, lam, sp.vectors[static_cast<std::size_t>(i)]);
    eq = std::max(eq, r.equality && r.sign == Verdict::pass ? std::abs(r.margin) : INFINITY);
  }
  t.below("circle(1) thm1_1 equality with sign(lambda) = sign(H)", eq, 1e-8);
  const auto& s3 = models[4].second;
  const auto gh = assemble_hypersurface_dirac(s3, opts);
  const auto gs = eigensolve(gh, 2);
  const BoundReport z = evaluate_bound(T::zhang4_1, gh, gs.values(0), gs.vectors[0]);
  t.below("S3(pi/3) zhang4_1 rhs = tan^2(pi/6)", std::abs(z.rhs - 1.0 / 3.0), 1e-7);
}

void conformal(Table t) {
  ScalarSpec u;
  u.terms.push_back({"sin", 0.2, 1, 0, 0});
  const auto c = discretize(make_model(ModelKind::circle, {1.0}), 128);
  t.below("circle covariance, u = 0.2 sin", conformal_covariance_residual(c, u), 1e-8);
  const auto cs = eigensolve(assemble_conformal_dirac(c, u), 6);
  double len = 0.0;
  const RVector uv = c->scalar(u).value;
  for (int p = 0; p < c->nodes; ++p) len += c->weights(p) * std::exp(uv(p));
  std::vector<double> want;
  for (int k = 0; k < 3; ++k) {
    want.push_back(2 * kPi / len * (k + 0.5));
    want.push_back(-2 * kPi / len * (k + 0.5));
  }
  t.below("conformal circle spectrum = circle of length int e^u", multiset_error(values_of(cs), want), 1e-8);

  ScalarSpec ut;
  ut.terms.push_back({"cos", 0.3, 1, 0, 0});
  const auto tor = discretize(make_model(ModelKind::flat_torus2, {}), 21);
  t.below("flat torus covariance, u = 0.3 cos x", conformal_covariance_residual(tor, ut), 1e-8);
  const auto top = assemble_dirac_schrodinger(tor, ScalarSpec::constant(1.0));
  const auto ts = eigensolve(top, 4);
  const QbarScaling qs = qbar_scaling_residual(tor, ut, ts.vectors[0]);
  t.below("Q-bar = e^{-u} Q (torus plane wave)", std::max(qs.tensor_residual, qs.norm_residual), 1e-8);

  const auto bar = conformal_transform(tor, ut);
  t.below("conformal torus Lichnerowicz with R-bar", lichnerowicz_residual(*bar), 1e-6);
  const auto sphere = discretize(make_model(ModelKind::sphere2, {1.0}), 12);
  const TransformedGeometry tg = transform_geometry(*sphere, ScalarSpec::constant(0.3));
  t.below("sphere homothety R-bar = 2e^{-2c}, H-bar = 2e^{-c}",
          std::max((tg.R_bar.array() - 2 * std::exp(-0.6)).abs().maxCoeff(),
                   (tg.H_bar.array() - 2 * std::exp(-0.3)).abs().maxCoeff()),
          1e-10);

  const auto sh = assemble_hypersurface_dirac(sphere);
  const auto ss = eigensolve(sh, 2);
  const BoundReport b1 = evaluate_bound(TheoremId::thm1_1, sh, ss.values(0), ss.vectors[0]);
  const BoundReport b2 = evaluate_conformal_bounds(TheoremId::thm1_2, sh, ss.values(0), ss.vectors[0], {});
  t.flag("thm1_2 at u = 0 equals thm1_1 (bit-for-bit)", b1.rhs == b2.rhs && b1.status == b2.status);
  const OptimizeResult opt = optimize_u(TheoremId::thm1_2, sh, ss.values(0), ss.vectors[0], {40, 2, 0.25, 1e-3});
  t.flag("optimizer keeps u = 0 on sphere2(1)", opt.best.terms.empty() && opt.rhs_best >= opt.rhs_initial - 1e-9);
  const WEMCheck w = wem_equality_check(ss.vectors[0], log_density_factor(ss.vectors[0]));
  t.below("sphere2(1) Killing spinor WEM residual", std::max(w.du_residual, w.wem_residual), 1e-7);
}

}  // namespace

const std::vector<std::string>& verify_suite_names() {
  static const std::vector<std::string> names = {"algebra", "geometry", "operators", "bounds", "conformal", "all"};
  return names;
}

std::vector<VerifyRow> run_verify_suite(const std::string& name, const VerifyOptions& opts) {
  std::vector<VerifyRow> rows;
  const bool all = name == "all";
  if (!all && std::find(verify_suite_names().begin(), verify_suite_names().end(), name) == verify_suite_names().end())
    throw ConfigError("verify: unknown suite '" + name + "'");
  if (all || name == "algebra") algebra({"algebra", rows});
  if (all || name == "geometry") geometry({"geometry", rows});
  if (all || name == "operators") operators({"operators", rows}, opts.assembly);
  if (all || name == "bounds") bounds({"bounds", rows}, opts.assembly);
  if (all || name == "conformal") conformal({"conformal", rows});
  return rows;
}

std::string format_verify_table(const std::vector<VerifyRow>& rows) {
  std::ostringstream out;
  std::size_t width = 10;
  for (const auto& r : rows) width = std::max(width, r.name.size());
  char buf[512];
  int failed = 0;
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%-4s  %-10s %-*s %12.4e %s %.1e\n", r.pass ? "PASS" : "FAIL", r.suite.c_str(),
                  static_cast<int>(width), r.name.c_str(), r.value, r.at_least ? ">=" : "< ", r.threshold);
    out << buf;
    failed += !r.pass;
  }
  out << rows.size() - failed << "/" << rows.size() << " passed\n";
  return out.str();
}

}  // namespace spinbound
