#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "spinbound/energy_momentum.hpp"

using namespace spinbound;

namespace {
constexpr double kPi = std::numbers::pi;

// Re(e_i.nu.nabla_j phi + e_j.nu.nabla_i phi, phi) / (2|phi|^2) assembled directly from the
// discretization data, node by node.
RMatrix q_oracle(const SpinorField& phi, int p) {
  const Discretization& d = *phi.disc;
  const CVector v = phi.nodal();
  const auto seg = v.segment(p * d.s, d.s);
  RMatrix q(d.n, d.n);
  for (int i = 0; i < d.n; ++i)
    for (int j = 0; j < d.n; ++j) {
      const CVector gi = (d.nabla[static_cast<std::size_t>(i)] * phi.coeffs).segment(p * d.s, d.s);
      const CVector gj = (d.nabla[static_cast<std::size_t>(j)] * phi.coeffs).segment(p * d.s, d.s);
      const cplx a = seg.dot(d.tangent[static_cast<std::size_t>(p)][i] * gj);
      const cplx b = seg.dot(d.tangent[static_cast<std::size_t>(p)][j] * gi);
      q(i, j) = 0.5 * std::real(a + b) / seg.squaredNorm();
    }
  return q;
}
}  // namespace

TEST_CASE("zero spinor is rejected") {
  const auto d = discretize(make_model(ModelKind::circle, {1.0}), 16);
  CHECK_THROWS_AS(compute_Q({d, CVector::Zero(d->dim)}), NumericalError);
}

TEST_CASE("tensor matches a direct nodal evaluation and is symmetric") {
  std::mt19937_64 rng(5);
  for (const auto& d : {discretize(make_model(ModelKind::sphere2, {1.0}), 6),
                        discretize(make_model(ModelKind::flat_torus2, {}), 7),
                        discretize(make_model(ModelKind::ellipse, {2.0, 1.0}), 32)}) {
    const SpinorField phi{d, random_coefficients(*d, rng, 3)};
    const EMTensorField q = compute_Q(phi);
    if (d->eval.isIdentity()) {
      for (int p = 0; p < d->nodes; p += 7)
        if (!q.masked[static_cast<std::size_t>(p)]) CHECK((q.Q[static_cast<std::size_t>(p)] - q_oracle(phi, p)).cwiseAbs().maxCoeff() < 1e-10);
    }
    for (int p = 0; p < d->nodes; ++p) {
      const RMatrix& m = q.Q[static_cast<std::size_t>(p)];
      CHECK((m - m.transpose()).cwiseAbs().maxCoeff() < 1e-13);
    }
  }
}

TEST_CASE("trace identity tr Q |phi|^2 = Re(D phi, phi) on random spinors") {
  std::mt19937_64 rng(17);
  for (const auto& d : {discretize(make_model(ModelKind::circle, {1.0}), 64),
                        discretize(make_model(ModelKind::ellipse, {2.0, 1.0}), 128),
                        discretize(make_model(ModelKind::sphere2, {1.0}), 8),
                        discretize(make_model(ModelKind::geodesic_sphere_S3, {kPi / 3}), 8),
                        discretize(make_model(ModelKind::flat_torus2, {}), 11)}) {
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
      const SpinorField phi{d, random_coefficients(*d, rng, 3)};
      worst = std::max(worst, trace_identity_residual(phi, compute_Q(phi)));
    }
    CHECK(worst < 1e-10);
  }
}

TEST_CASE("circle eigenspinors: Q equals the D-eigenvalue and they are EM-spinors") {
  const auto d = discretize(make_model(ModelKind::circle, {1.0}), 64);
  const auto s = eigensolve(assemble_intrinsic_dirac(d), 6);
  for (int i = 0; i < 6; ++i) {
    const auto& phi = s.vectors[static_cast<std::size_t>(i)];
    const EMTensorField q = compute_Q(phi);
    for (int p = 0; p < d->nodes; ++p) CHECK(q.Q[static_cast<std::size_t>(p)](0, 0) == doctest::Approx(s.values(i)).epsilon(1e-10));
    const EMSpinorCheck em = em_spinor_residual(phi, q);
    CHECK(em.residual < 1e-10);
    CHECK(em.t_killing);
  }
}

TEST_CASE("Killing spinors on the round sphere") {
  const auto d = discretize(make_model(ModelKind::sphere2, {1.0}), 12);
  const auto s = eigensolve(assemble_hypersurface_dirac(d), 2);
  for (int i = 0; i < 2; ++i) {
    const auto& phi = s.vectors[static_cast<std::size_t>(i)];
    const EMTensorField q = compute_Q(phi);
    double dev = 0.0, srem = 0.0;
    for (int p = 0; p < d->nodes; ++p) {
      dev = std::max(dev, (q.Q[static_cast<std::size_t>(p)] - 0.5 * RMatrix::Identity(2, 2)).norm());
      // 4|Q|^2 = n R/(n-1) - R with n = 2, R = 2.
      srem = std::max(srem, std::abs(4 * q.frobenius_sq(p) - (2.0 * 2.0 / 1.0 - 2.0)));
    }
    CHECK(dev < 1e-6);
    CHECK(srem < 1e-7);
    const QtrCheck qt = qtr_identity_residual(phi, q);
    CHECK(qt.status == Status::strict);
    CHECK(qt.residual < 1e-8);
    CHECK(q.masked_count == 0);
  }
}

TEST_CASE("torus plane waves: |Q|^2 = mu^2 and tr Q = mu") {
  const auto d = discretize(make_model(ModelKind::flat_torus2, {}), 15);
  const auto s = eigensolve(assemble_intrinsic_dirac(d), 18);
  for (int i = 2; i < 18; ++i) {
    const auto& phi = s.vectors[static_cast<std::size_t>(i)];
    const EMTensorField q = compute_Q(phi);
    const double mu = s.values(i);
    for (int p = 0; p < d->nodes; p += 13) {
      CHECK(q.frobenius_sq(p) == doctest::Approx(mu * mu).epsilon(1e-9));
      CHECK(q.trace(p) == doctest::Approx(mu).epsilon(1e-9));
    }
    CHECK(em_spinor_residual(phi, q).residual < 1e-10);
  }
}

TEST_CASE("random spinors are not EM-spinors and skip the trace-derivative identity") {
  std::mt19937_64 rng(23);
  const auto d = discretize(make_model(ModelKind::sphere2, {1.0}), 8);
  const SpinorField phi{d, random_coefficients(*d, rng, 3)};
  const EMTensorField q = compute_Q(phi);
  CHECK(em_spinor_residual(phi, q).residual > 0.1);
  CHECK(qtr_identity_residual(phi, q).status == Status::not_applicable);
}

TEST_CASE("zero set is masked and reported") {
  const auto d = discretize(make_model(ModelKind::circle, {1.0}), 32);
  const auto s = eigensolve(assemble_intrinsic_dirac(d), 2);
  // cos-type combination of the +-1/2 modes vanishes at isolated nodes.
  CVector c = s.vectors[0].coeffs + s.vectors[1].coeffs;
  CVector nodal = d->evaluate(c);
  nodal(0) = 0.0;
  nodal(16) = 0.0;
  const EMTensorField q = compute_Q({d, d->project(nodal)});
  CHECK(q.masked[0]);
  CHECK(q.masked[16]);
  CHECK(q.masked_count >= 2);
  CHECK(q.mask_fraction() == doctest::Approx(q.masked_count / 32.0));
}
