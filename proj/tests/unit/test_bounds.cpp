#include <doctest.h>

#include <cmath>
#include <numbers>

#include "spinbound/bounds.hpp"

using namespace spinbound;

namespace {
constexpr double kPi = std::numbers::pi;

struct Mode {
  double lambda;
  SpinorField phi;
};

std::vector<Mode> modes(const DiscreteOperator& op, int count) {
  const auto s = eigensolve(op, count);
  std::vector<Mode> out;
  for (int i = 0; i < count; ++i) out.push_back({s.values(i), s.vectors[static_cast<std::size_t>(i)]});
  return out;
}
}  // namespace

TEST_CASE("theorem ids and operators") {
  for (TheoremId t : all_theorems()) CHECK(theorem_from_string(to_string(t)) == t);
  CHECK_THROWS_AS(theorem_from_string("thm9"), ConfigError);
  CHECK(theorem_operator(TheoremId::thm1_1) == OperatorKind::D_H);
  CHECK(theorem_operator(TheoremId::friedrich) == OperatorKind::D);
  CHECK(theorem_operator(TheoremId::df_prop2) == OperatorKind::D_f);
  CHECK(theorem_is_conformal(TheoremId::thm1_2));
  CHECK(theorem_is_conformal(TheoremId::hijazi_zhang6_1));
  CHECK(theorem_is_conformal(TheoremId::df_prop3));
  CHECK_FALSE(theorem_is_conformal(TheoremId::zhang4_1));
}

TEST_CASE("operator/theorem mismatch is a configuration error") {
  const auto d = discretize(make_model(ModelKind::circle, {1.0}), 16);
  const auto op = assemble_intrinsic_dirac(d);
  const auto m = modes(op, 1);
  CHECK_THROWS_AS(evaluate_bound(TheoremId::thm1_1, op, m[0].lambda, m[0].phi), ConfigError);
}

TEST_CASE("circle: equality in the main bound for positive modes") {
  const auto d = discretize(make_model(ModelKind::circle, {1.0}), 64);
  const auto op = assemble_hypersurface_dirac(d);
  int equalities = 0;
  for (const auto& m : modes(op, 7)) {
    const BoundReport r = evaluate_bound(TheoremId::thm1_1, op, m.lambda, m.phi);
    CHECK(r.sound());
    const double mu = m.lambda + 0.5;  // D-eigenvalue
    if (m.lambda > 0.5) {
      CHECK(r.status == Status::strict);
      CHECK(r.rhs == doctest::Approx(0.25 * (2 * std::abs(mu) - 1) * (2 * std::abs(mu) - 1)).epsilon(1e-10));
      CHECK(std::abs(r.lambda_sq - r.rhs) < 1e-8);
      CHECK(r.equality);
      REQUIRE(r.residual.has_value());
      CHECK(*r.residual < 1e-8);
      CHECK(r.sign == Verdict::pass);
      CHECK(sign_diagnostics(r) == Verdict::pass);
      CHECK(r.equality_consistency() == Verdict::pass);
      ++equalities;
    }
    if (m.lambda < -1.5) {
      // mu = -3/2: lambda = -2, lambda^2 = 4 > rhs = 1, no equality, no sign claim.
      CHECK_FALSE(r.equality);
      CHECK(r.sign == Verdict::not_applicable);
    }
  }
  CHECK(equalities == 3);
}

TEST_CASE("round sphere: boundary status for the D_H kernel, Friedrich equality for D") {
  const auto d = discretize(make_model(ModelKind::sphere2, {1.0}), 12);
  const auto dh = assemble_hypersurface_dirac(d);
  for (const auto& m : modes(dh, 2)) {
    for (TheoremId t : {TheoremId::thm1_1, TheoremId::zhang4_1}) {
      const BoundReport r = evaluate_bound(t, dh, m.lambda, m.phi);
      CHECK(r.status == Status::boundary);
      CHECK(std::abs(r.rhs) < 1e-12);
      CHECK(std::abs(r.lambda_sq) < 1e-12);
      CHECK(r.sound());
    }
    const ImprovementRecord imp = improvement_comparison(dh, m.lambda, m.phi);
    CHECK(imp.thm1_status == Status::boundary);
    CHECK(imp.zhang_status == Status::boundary);
    CHECK(std::abs(imp.rhs_thm1) < 1e-12);
    CHECK(std::abs(imp.rhs_zhang) < 1e-12);
  }
  const auto dd = assemble_intrinsic_dirac(d);
  for (const auto& m : modes(dd, 4)) {
    const BoundReport f = evaluate_bound(TheoremId::friedrich, dd, m.lambda, m.phi);
    CHECK(std::abs(m.lambda * m.lambda - 1.0) < 1e-8);
    CHECK(f.rhs == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(f.equality);
    CHECK(f.equality_consistency() == Verdict::pass);
    CHECK(killing_residual(m.phi, m.lambda) < 1e-8);
    const BoundReport h = evaluate_bound(TheoremId::hijazi_em, dd, m.lambda, m.phi);
    CHECK(h.equality);
  }
}

TEST_CASE("geodesic spheres: Einstein-type bound is attained and agrees with the main bound") {
  for (double rho : {kPi / 4, kPi / 3}) {
    CAPTURE(rho);
    const auto d = discretize(make_model(ModelKind::geodesic_sphere_S3, {rho}), 10);
    const auto op = assemble_hypersurface_dirac(d);
    const auto m = modes(op, 2);
    const double t2 = std::tan(rho / 2) * std::tan(rho / 2);
    const BoundReport z = evaluate_bound(TheoremId::zhang4_1, op, m[0].lambda, m[0].phi);
    const BoundReport b = evaluate_bound(TheoremId::thm1_1, op, m[0].lambda, m[0].phi);
    CHECK(z.rhs == doctest::Approx(t2).epsilon(1e-7));
    CHECK(b.rhs == doctest::Approx(t2).epsilon(1e-7));
    CHECK(z.equality);
    CHECK(b.equality);
    CHECK(z.sign == Verdict::pass);
    REQUIRE(z.residual.has_value());
    CHECK(*z.residual < 1e-7);
    const ImprovementRecord imp = improvement_comparison(op, m[0].lambda, m[0].phi);
    CHECK(imp.killing);
    REQUIRE(imp.bounds_agree.has_value());
    CHECK(*imp.bounds_agree);
  }
}

TEST_CASE("flat torus Dirac-Schroedinger: equality for EM plane waves with f = 1") {
  const auto d = discretize(make_model(ModelKind::flat_torus2, {}), 15);
  const auto op = assemble_dirac_schrodinger(d, ScalarSpec::constant(1.0));
  const auto ms = modes(op, 20);
  int hits = 0;
  for (double mu : {1.0, std::sqrt(2.0), 2.0}) {
    for (const auto& m : ms) {
      if (std::abs(m.lambda - (mu - 0.5)) > 1e-9) continue;
      const BoundReport r = evaluate_bound(TheoremId::df_prop2, op, m.lambda, m.phi);
      CHECK(std::abs(r.lambda_sq - 0.25 * (2 * mu - 1) * (2 * mu - 1)) < 1e-8);
      CHECK(std::abs(r.margin) < 1e-8);
      CHECK(r.equality);
      CHECK(r.em_residual < 1e-10);
      ++hits;
      break;
    }
  }
  CHECK(hits == 3);
  // R = 0 puts every mode outside the Einstein-type hypothesis.
  const BoundReport e = evaluate_bound(TheoremId::df_prop1, op, ms[4].lambda, ms[4].phi);
  CHECK(e.status == Status::violated);
}

TEST_CASE("zero potential reduces the Dirac-Schroedinger bound to the energy-momentum bound") {
  const auto d = discretize(make_model(ModelKind::flat_torus2, {}), 15);
  const auto op0 = assemble_dirac_schrodinger(d, ScalarSpec{});
  const auto dd = assemble_intrinsic_dirac(d);
  for (const auto& m : modes(op0, 10)) {
    if (std::abs(m.lambda) < 0.5) continue;
    const BoundReport a = evaluate_bound(TheoremId::df_prop2, op0, m.lambda, m.phi);
    const BoundReport b = evaluate_bound(TheoremId::hijazi_em, dd, m.lambda, m.phi);
    CHECK(a.rhs == doctest::Approx(m.lambda * m.lambda).epsilon(1e-10));
    CHECK(b.rhs == doctest::Approx(m.lambda * m.lambda).epsilon(1e-10));
  }
}

TEST_CASE("soundness and equality consistency across models") {
  struct Case {
    DiscretizationPtr d;
    OperatorKind kind;
  };
  std::vector<Case> cases = {
      {discretize(make_model(ModelKind::ellipse, {2.0, 1.0}), 128), OperatorKind::D_H},
      {discretize(make_model(ModelKind::sphere2, {1.0}), 8), OperatorKind::D},
      {discretize(make_model(ModelKind::geodesic_sphere_S3, {1.2}), 8), OperatorKind::D_H},
      {discretize(make_model(ModelKind::conformal_torus2, {0.2}), 15), OperatorKind::D_f},
  };
  for (const auto& c : cases) {
    const DiscreteOperator op = c.kind == OperatorKind::D     ? assemble_intrinsic_dirac(c.d)
                                : c.kind == OperatorKind::D_H ? assemble_hypersurface_dirac(c.d)
                                                              : assemble_dirac_schrodinger(c.d, ScalarSpec::constant(1.0));
    for (const auto& m : modes(op, 8))
      for (TheoremId t : all_theorems()) {
        if (theorem_operator(t) != c.kind) continue;
        const BoundReport r = evaluate_bound(t, op, m.lambda, m.phi);
        CHECK(r.sound());
        CHECK(r.equality_consistency() != Verdict::fail);
        if (r.status == Status::violated) CHECK_FALSE(r.equality);
      }
  }
}

TEST_CASE("homothety preserves every status") {
  const auto d2 = discretize(make_model(ModelKind::sphere2, {1.0}), 8);
  const auto d3 = discretize(make_model(ModelKind::sphere2, {2.5}), 8);
  const auto a = assemble_hypersurface_dirac(d2), b = assemble_hypersurface_dirac(d3);
  // Degenerate eigenspaces have no canonical basis here, so carry the same coefficient vector over:
  // the harmonic basis is scale independent and D scales by 1/r.
  const auto ma = modes(a, 6);
  for (int i = 0; i < 6; ++i) {
    const auto& m = ma[static_cast<std::size_t>(i)];
    const SpinorField phib{d3, m.phi.coeffs};
    const double lamb = m.lambda / 2.5;
    CHECK((b.matrix * phib.coeffs - lamb * phib.coeffs).norm() < 1e-10 * phib.coeffs.norm());
    for (TheoremId t : {TheoremId::thm1_1, TheoremId::zhang4_1}) {
      const BoundReport ra = evaluate_bound(t, a, m.lambda, m.phi);
      const BoundReport rb = evaluate_bound(t, b, lamb, phib);
      CHECK(ra.status == rb.status);
      CHECK(ra.equality == rb.equality);
      CHECK(std::abs(rb.rhs - ra.rhs / 6.25) < 1e-10);
    }
  }
}
