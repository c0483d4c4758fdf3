#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>

#include "spinbound/conformal.hpp"

using namespace spinbound;

namespace {
constexpr double kPi = std::numbers::pi;

ScalarSpec term(const std::string& type, double amp, int k1, int k2 = 0, int axis = 0) {
  return {{{type, amp, k1, k2, axis}}};
}

// Gaussian curvature of e^{2u}(dx^2 + dy^2) by the orthogonal-metric Brioschi formula, with every
// derivative a fourth-order central difference of the metric coefficient E = G = e^{2u}.
double brioschi_R(const std::function<double(double, double)>& u, double x, double y, double h = 1e-3) {
  auto E = [&](double a, double b) { return std::exp(2 * u(a, b)); };
  auto d = [&](auto f, double a, double b, int axis) {
    auto at = [&](double s) { return axis == 0 ? f(a + s, b) : f(a, b + s); };
    return (-at(2 * h) + 8 * at(h) - 8 * at(-h) + at(-2 * h)) / (12 * h);
  };
  auto tx = [&](double a, double b) { return d(E, a, b, 0) / E(a, b); };
  auto ty = [&](double a, double b) { return d(E, a, b, 1) / E(a, b); };
  return 2 * (-(d(tx, x, y, 0) + d(ty, x, y, 1)) / (2 * E(x, y)));
}

double circle_length(const Discretization& d, const ScalarSpec& u) {
  const RVector uv = d.scalar(u).value;
  double len = 0.0;
  for (int p = 0; p < d.nodes; ++p) len += d.weights(p) * std::exp(uv(p));
  return len;
}
}  // namespace

TEST_CASE("transformed geometry: identity, homothety and the n = 2 law") {
  const auto s = discretize(make_model(ModelKind::sphere2, {1.0}), 8);
  const TransformedGeometry id = transform_geometry(*s, {});
  CHECK((id.R_bar - s->R).cwiseAbs().maxCoeff() < 1e-14);
  CHECK((id.H_bar - s->H).cwiseAbs().maxCoeff() < 1e-14);
  const TransformedGeometry c = transform_geometry(*s, ScalarSpec::constant(0.4));
  CHECK((c.R_bar.array() - 2 * std::exp(-0.8)).abs().maxCoeff() < 1e-12);
  CHECK((c.H_bar.array() - 2 * std::exp(-0.4)).abs().maxCoeff() < 1e-12);
  CHECK((c.q_scale.array() - std::exp(-0.4)).abs().maxCoeff() < 1e-14);

  const auto t = discretize(make_model(ModelKind::flat_torus2, {}), 15);
  const TransformedGeometry g = transform_geometry(*t, term("cos", 0.3, 1));
  double worst = 0.0;
  for (int p = 0; p < t->nodes; ++p) {
    const auto& x = t->coords[static_cast<std::size_t>(p)];
    worst = std::max(worst, std::abs(g.R_bar(p) - brioschi_R([](double a, double) { return 0.3 * std::cos(a); }, x[0], x[1])));
  }
  CHECK(worst < 1e-6);

  const auto c1 = discretize(make_model(ModelKind::circle, {1.0}), 16);
  CHECK(transform_geometry(*c1, term("sin", 0.2, 1)).R_bar.cwiseAbs().maxCoeff() == 0.0);
  // Geodesic sphere: intrinsically round of radius a = sin(rho); Lap z = -2z/a^2 for the unit position z,
  // so R-bar e^{2u} = (2 + 0.4 z)/a^2 for u = 0.1 z.
  const auto g3 = discretize(make_model(ModelKind::geodesic_sphere_S3, {1.0}), 6);
  const TransformedGeometry tg = transform_geometry(*g3, term("coord", 0.1, 0));
  const double a2 = std::sin(1.0) * std::sin(1.0);
  double law = 0.0;
  for (int p = 0; p < g3->nodes; ++p)
    law = std::max(law, std::abs(tg.R_bar_e2u(p) - (2 + 0.4 * g3->unit_position[static_cast<std::size_t>(p)](0)) / a2));
  CHECK(law < 1e-10);
}

TEST_CASE("conformal torus model curvature matches the Brioschi oracle") {
  const auto d = discretize(make_model(ModelKind::conformal_torus2, {0.2}), 21);
  double worst = 0.0;
  for (int p = 0; p < d->nodes; ++p) {
    const auto& x = d->coords[static_cast<std::size_t>(p)];
    worst = std::max(worst, std::abs(d->R(p) - brioschi_R([](double a, double) { return 0.2 * std::cos(a); }, x[0], x[1])));
  }
  CHECK(worst < 1e-6);
}

TEST_CASE("conformal covariance of the Dirac operator") {
  const auto c = discretize(make_model(ModelKind::circle, {1.0}), 128);
  CHECK(conformal_covariance_residual(c, {}) < 1e-12);
  CHECK(conformal_covariance_residual(c, ScalarSpec::constant(0.7)) < 1e-10);
  CHECK(conformal_covariance_residual(c, term("sin", 0.2, 1)) < 1e-8);
  const auto t = discretize(make_model(ModelKind::flat_torus2, {}), 21);
  ScalarSpec u = term("cos", 0.2, 1);
  u.terms.push_back({"sin", 0.1, 1, 1, 0});
  CHECK(conformal_covariance_residual(t, u) < 1e-8);
  const auto s = discretize(make_model(ModelKind::sphere2, {1.0}), 6);
  CHECK_THROWS_AS(conformal_covariance_residual(s, {}), ConfigError);
}

TEST_CASE("conformal circle spectrum depends only on the length") {
  const auto c = discretize(make_model(ModelKind::circle, {1.0}), 96);
  const auto plain = eigensolve(assemble_conformal_dirac(c, {}), 6);
  const auto ref = eigensolve(assemble_intrinsic_dirac(c), 6);
  CHECK((plain.values - ref.values).cwiseAbs().maxCoeff() < 1e-12);
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> amp(-0.25, 0.25);
  for (int trial = 0; trial < 5; ++trial) {
    ScalarSpec u;
    for (int k = 1; k <= 3; ++k) {
      u.terms.push_back({"cos", amp(rng), k, 0, 0});
      u.terms.push_back({"sin", amp(rng), k, 0, 0});
    }
    const double scale = 2 * kPi / circle_length(*c, u);
    const auto sd = eigensolve(assemble_conformal_dirac(c, u), 6);
    std::vector<double> got(sd.values.data(), sd.values.data() + 6);
    std::sort(got.begin(), got.end());
    const std::vector<double> want = {-2.5, -1.5, -0.5, 0.5, 1.5, 2.5};
    for (int i = 0; i < 6; ++i) CHECK(std::abs(got[static_cast<std::size_t>(i)] - scale * want[static_cast<std::size_t>(i)]) < 1e-9);
    // H-bar = e^{-u} has total curvature 2 pi, so D_H-bar has spectrum scale * Z.
    const auto sh = eigensolve(assemble_conformal_dirac(c, u, OperatorKind::D_H), 5);
    std::vector<double> goth(sh.values.data(), sh.values.data() + 5);
    std::sort(goth.begin(), goth.end());
    for (int i = 0; i < 5; ++i) CHECK(std::abs(goth[static_cast<std::size_t>(i)] - scale * (i - 2)) < 1e-9);
  }
}

TEST_CASE("conformal torus operator: Hermitian, symmetric spectrum, Lichnerowicz with R-bar") {
  const auto t = discretize(make_model(ModelKind::flat_torus2, {}), 15);
  const ScalarSpec u = term("cos", 0.2, 1);
  const auto op = assemble_conformal_dirac(t, u);
  CHECK(hermiticity_defect(op) < 1e-10);
  const auto s = eigensolve(op, 10);
  std::vector<double> pos, neg;
  for (int i = 0; i < 10; ++i) (s.values(i) > 0 ? pos : neg).push_back(std::abs(s.values(i)));
  std::sort(pos.begin(), pos.end());
  std::sort(neg.begin(), neg.end());
  const std::size_t m = std::min(pos.size(), neg.size());
  for (std::size_t i = 0; i + 1 < m; ++i) CHECK(std::abs(pos[i] - neg[i]) < 1e-8);
  CHECK(lichnerowicz_residual(*op.disc) < 1e-6);
  const auto zero = assemble_conformal_dirac(t, {});
  CHECK((zero.matrix - assemble_intrinsic_dirac(t).matrix).cwiseAbs().maxCoeff() < 1e-12);
  CHECK_THROWS_AS(assemble_conformal_dirac(discretize(make_model(ModelKind::sphere2, {1.0}), 6), u), ConfigError);
}

TEST_CASE("Q-bar scaling for transported eigenspinors") {
  const auto t = discretize(make_model(ModelKind::flat_torus2, {}), 15);
  const auto s = eigensolve(assemble_intrinsic_dirac(t), 10);
  ScalarSpec u = term("cos", 0.3, 1);
  u.terms.push_back({"sin", -0.2, 0, 1, 0});
  for (int i = 0; i < 10; ++i) {
    if (std::abs(s.values(i)) < 1e-6) continue;
    const QbarScaling q = qbar_scaling_residual(t, u, s.vectors[static_cast<std::size_t>(i)]);
    CHECK(q.tensor_residual < 1e-8);
    CHECK(q.norm_residual < 1e-8);
  }
  const auto c = discretize(make_model(ModelKind::circle, {1.0}), 64);
  const auto cs = eigensolve(assemble_intrinsic_dirac(c), 4);
  CHECK(qbar_scaling_residual(c, term("sin", 0.2, 1), cs.vectors[0]).tensor_residual < 1e-8);
}

TEST_CASE("conformal bounds reduce to the plain bounds at u = 0") {
  const auto s = discretize(make_model(ModelKind::sphere2, {1.0}), 10);
  const auto op = assemble_hypersurface_dirac(s);
  const auto sp = eigensolve(op, 6);
  for (int i = 0; i < 6; ++i) {
    const auto& phi = sp.vectors[static_cast<std::size_t>(i)];
    const BoundReport a = evaluate_bound(TheoremId::thm1_1, op, sp.values(i), phi);
    const BoundReport b = evaluate_conformal_bounds(TheoremId::thm1_2, op, sp.values(i), phi, {});
    CHECK(a.rhs == b.rhs);
    CHECK(a.status == b.status);
    const BoundReport z = evaluate_bound(TheoremId::zhang4_1, op, sp.values(i), phi);
    const BoundReport hz = evaluate_conformal_bounds(TheoremId::hijazi_zhang6_1, op, sp.values(i), phi, {});
    CHECK(z.rhs == hz.rhs);
    CHECK(z.status == hz.status);
  }
  CHECK_THROWS_AS(evaluate_conformal_bounds(TheoremId::thm1_1, op, sp.values(0), sp.vectors[0], {}), ConfigError);
}

TEST_CASE("constant factor on the circle leaves the bound unchanged") {
  const auto c = discretize(make_model(ModelKind::circle, {1.0}), 64);
  const auto op = assemble_hypersurface_dirac(c);
  const auto sp = eigensolve(op, 7);
  for (int i = 0; i < 7; ++i) {
    const auto& phi = sp.vectors[static_cast<std::size_t>(i)];
    const BoundReport a = evaluate_conformal_bounds(TheoremId::thm1_2, op, sp.values(i), phi, {});
    const BoundReport b = evaluate_conformal_bounds(TheoremId::thm1_2, op, sp.values(i), phi, ScalarSpec::constant(0.8));
    CHECK(a.status == b.status);
    CHECK(b.rhs == doctest::Approx(a.rhs).epsilon(1e-12));
  }
}

TEST_CASE("conformal torus Dirac-Schroedinger bound is sound for the lowest modes") {
  const auto d = discretize(make_model(ModelKind::conformal_torus2, {0.2}), 21);
  const auto op = assemble_dirac_schrodinger(d, ScalarSpec::constant(1.0));
  const auto sp = eigensolve(op, 4);
  for (int i = 0; i < 4; ++i) {
    const BoundReport r = evaluate_conformal_bounds(TheoremId::df_prop3, op, sp.values(i), sp.vectors[static_cast<std::size_t>(i)],
                                                    term("cos", -0.1, 1));
    CHECK(r.sound());
  }
}

TEST_CASE("optimizer: deterministic, never worse than u = 0, identity where the bound is rigid") {
  SUBCASE("round sphere kernel stays at u = 0") {
    const auto s = discretize(make_model(ModelKind::sphere2, {1.0}), 10);
    const auto op = assemble_hypersurface_dirac(s);
    const auto sp = eigensolve(op, 1);
    const OptimizeResult r = optimize_u(TheoremId::thm1_2, op, sp.values(0), sp.vectors[0], {30, 1, 0.25, 1e-2});
    CHECK(r.best.terms.empty());
    CHECK(r.rhs_best >= r.rhs_initial - 1e-9);
    CHECK_FALSE(r.log.empty());
  }
  SUBCASE("circle: the right-hand side ignores u") {
    const auto c = discretize(make_model(ModelKind::circle, {1.0}), 32);
    const auto op = assemble_hypersurface_dirac(c);
    const auto sp = eigensolve(op, 7);
    const OptimizeResult r = optimize_u(TheoremId::thm1_2, op, sp.values(6), sp.vectors[6], {40, 2, 0.25, 1e-2});
    CHECK(r.best.terms.empty());
    CHECK(r.rhs_best == r.rhs_initial);
  }
  SUBCASE("conformal torus: improvement is monotone and reproducible") {
    const auto d = discretize(make_model(ModelKind::conformal_torus2, {0.2}), 15);
    const auto op = assemble_dirac_schrodinger(d, ScalarSpec::constant(1.0));
    const auto sp = eigensolve(op, 1);
    const OptimizeOptions oo{25, 1, 0.25, 1e-3};
    const OptimizeResult a = optimize_u(TheoremId::df_prop3, op, sp.values(0), sp.vectors[0], oo);
    const OptimizeResult b = optimize_u(TheoremId::df_prop3, op, sp.values(0), sp.vectors[0], oo);
    CHECK(a.rhs_best >= a.rhs_initial - 1e-9);
    CHECK(a.rhs_best == b.rhs_best);
    CHECK(a.log == b.log);
    CHECK(a.evaluations <= 25);
    CHECK(a.budget_exhausted);
    const BoundReport r = evaluate_conformal_bounds(TheoremId::df_prop3, op, sp.values(0), sp.vectors[0], a.best);
    CHECK(r.sound());
    CHECK(r.rhs == doctest::Approx(a.rhs_best).epsilon(1e-12));
  }
  const auto s = discretize(make_model(ModelKind::sphere2, {1.0}), 6);
  const auto op = assemble_hypersurface_dirac(s);
  const auto sp = eigensolve(op, 1);
  CHECK_THROWS_AS(optimize_u(TheoremId::thm1_1, op, sp.values(0), sp.vectors[0]), ConfigError);
}

TEST_CASE("weak energy-momentum equality conditions") {
  SUBCASE("Killing spinor with u = ln|phi|^2") {
    const auto s = discretize(make_model(ModelKind::sphere2, {1.0}), 12);
    const auto sp = eigensolve(assemble_hypersurface_dirac(s), 1);
    const ScalarField u = log_density_factor(sp.vectors[0]);
    CHECK(u.grad.cwiseAbs().maxCoeff() < 1e-8);
    const WEMCheck w = wem_equality_check(sp.vectors[0], u);
    CHECK(w.status == Status::strict);
    CHECK(w.du_residual < 1e-8);
    CHECK(w.wem_residual < 1e-7);
  }
  SUBCASE("torus plane wave with u = 0") {
    const auto t = discretize(make_model(ModelKind::flat_torus2, {}), 11);
    const auto sp = eigensolve(assemble_intrinsic_dirac(t), 4);
    const auto& phi = sp.vectors[3];
    const WEMCheck w = wem_equality_check(phi, t->scalar({}));
    CHECK(w.du_residual < 1e-10);
    CHECK(w.wem_residual < 1e-10);
    CHECK(w.wem_residual == doctest::Approx(em_spinor_residual(phi, compute_Q(phi)).residual).epsilon(1e-6));
  }
  SUBCASE("random spinor fails both conditions") {
    std::mt19937_64 rng(43);
    const auto s = discretize(make_model(ModelKind::sphere2, {1.0}), 8);
    const SpinorField phi{s, random_coefficients(*s, rng, 3)};
    const WEMCheck w = wem_equality_check(phi, s->scalar(term("coord", 0.3, 0, 0, 2)));
    CHECK(w.du_residual > 0.1);
    CHECK(w.wem_residual > 0.1);
  }
  SUBCASE("curves are outside the range") {
    const auto c = discretize(make_model(ModelKind::circle, {1.0}), 16);
    const auto sp = eigensolve(assemble_intrinsic_dirac(c), 1);
    CHECK(wem_equality_check(sp.vectors[0], c->scalar({})).status == Status::not_applicable);
    CHECK_THROWS_AS(log_density_factor(sp.vectors[0]), ConfigError);
  }
}
