#include "spinbound/spectral.hpp"

#include <cmath>
#include <numbers>

#include <boost/math/special_functions/spherical_harmonic.hpp>

namespace spinbound {

namespace {
constexpr double kPi = std::numbers::pi;

// Kappa values (in units of 2*pi/period) of an N-point Fourier grid.
std::vector<double> fourier_modes(int count, bool antiperiodic) {
  std::vector<double> k;
  if (antiperiodic) {
    for (int j = -count / 2; j < count / 2; ++j) k.push_back(j + 0.5);
  } else {
    for (int j = -(count - 1) / 2; j <= (count - 1) / 2; ++j) k.push_back(j);
  }
  return k;
}

// Spectral differentiation matrix on x_j = period * j / N.
CMatrix fourier_diff(int count, double period, bool antiperiodic) {
  const auto modes = fourier_modes(count, antiperiodic);
  CMatrix phi(count, count);
  for (int j = 0; j < count; ++j)
    for (int k = 0; k < count; ++k) phi(j, k) = std::polar(1.0, 2 * kPi * modes[k] * j / count);
  CVector ik(count);
  for (int k = 0; k < count; ++k) ik(k) = kI * (2 * kPi * modes[k] / period);
  CMatrix d = phi * ik.asDiagonal() * phi.adjoint() / static_cast<double>(count);
  // Real up to rounding because the mode set is symmetric.
  return d.real().cast<cplx>();
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

RVector repeat(const RVector& v, int s) {
  RVector out(v.size() * s);
  for (Eigen::Index i = 0; i < v.size(); ++i) out.segment(i * s, s).setConstant(v(i));
  return out;
}

void finalize(Discretization& d) {
  const RVector ws = repeat(d.weights, d.s);
  d.gram = d.eval.adjoint() * ws.asDiagonal() * d.eval;
  d.gram = 0.5 * (d.gram + d.gram.adjoint()).eval();
}

void build_curve(Discretization& d, bool antiperiodic) {
  const int count = d.resolution;
  if (count < 4) throw ConfigError("discretization.resolution: curves need at least 4 points");
  if (antiperiodic && count % 2 != 0)
    throw ConfigError("discretization.resolution: antiperiodic grids need an even point count");
  if (!antiperiodic && count % 2 == 0)
    throw ConfigError("discretization.resolution: periodic grids need an odd point count");
  d.n = 1;
  d.s = 1;
  d.nodes = count;
  d.dim = count;
  d.collocation = true;
  const GammaSet amb = build_gamma(2);
  const ChiralitySplit split = chirality_split(amb);
  d.lift = projector_range(split.projector_plus);
  d.s_amb = 2;
  const CMatrix c = d.lift.adjoint() * amb[0] * amb[1] * d.lift;
  const CMatrix dt = fourier_diff(count, 2 * kPi, antiperiodic);
  RVector inv_speed(count);
  d.weights.resize(count);
  d.H.resize(count);
  d.R.resize(count);
  for (int j = 0; j < count; ++j) {
    const double t = 2 * kPi * j / count;
    const double v = d.model.kind == ModelKind::circle ? d.model.param(0)
                                                        : ellipse_speed(d.model.param(0), d.model.param(1), t);
    inv_speed(j) = 1.0 / v;
    d.weights(j) = v * 2 * kPi / count;
    d.coords.push_back({t});
    d.tangent.push_back({c});
    d.ambient_e.push_back({amb[0]});
    d.ambient_nu.push_back(amb[1]);
    d.h.push_back(d.model.h_at({t}));
    d.H(j) = d.model.H_at({t});
    d.R(j) = d.model.R_at({t});
    d.chart_frame.push_back(RMatrix::Constant(1, 1, 1.0 / v));
  }
  d.eval = CMatrix::Identity(count, count);
  // Rotating-frame trivialization: the intrinsic spin connection of a curve vanishes.
  d.nabla = {inv_speed.cast<cplx>().asDiagonal() * dt};
}

void build_torus(Discretization& d, double l1, double l2) {
  const int count = d.resolution;
  if (count < 3 || count % 2 == 0)
    throw ConfigError("discretization.resolution: torus grids need an odd count >= 3");
  d.n = 2;
  d.s = 2;
  d.nodes = count * count;
  d.dim = d.nodes * d.s;
  d.collocation = true;
  const GammaSet tangent = alpha_embed(build_gamma(3));
  const CMatrix dx = fourier_diff(count, l1, false);
  const CMatrix dy = fourier_diff(count, l2, false);
  const CMatrix id_n = CMatrix::Identity(count, count);
  const CMatrix id_s = CMatrix::Identity(d.s, d.s);
  const CMatrix gx = kron(kron(dx, id_n), id_s);
  const CMatrix gy = kron(kron(id_n, dy), id_s);
  d.nabla = {gx, gy};
  d.momenta = {-kI * gx, -kI * gy};
  d.eval = CMatrix::Identity(d.dim, d.dim);
  d.weights = RVector::Constant(d.nodes, l1 * l2 / d.nodes);
  d.H = RVector::Zero(d.nodes);
  d.R = RVector::Zero(d.nodes);
  for (int j = 0; j < count; ++j)
    for (int k = 0; k < count; ++k) {
      d.coords.push_back({l1 * j / count, l2 * k / count});
      d.tangent.push_back({tangent[0], tangent[1]});
      d.chart_frame.push_back(RMatrix::Identity(2, 2));
    }
}

void build_sphere(Discretization& d, double radius) {
  const int band = d.resolution;
  if (band < 1) throw ConfigError("discretization.resolution: band limit must be >= 1");
  d.n = 2;
  d.s = 2;
  d.s_amb = 2;
  d.collocation = false;
  d.sphere_radius = radius;
  const int nlm = (band + 1) * (band + 1);
  const int nth = band + 4;
  const int nph = 2 * band + 8;
  d.nodes = nth * nph;
  d.dim = nlm * d.s;
  const auto [z, wz] = gauss_legendre(nth);
  const GammaSet amb = build_gamma(3);

  CMatrix y(d.nodes, nlm);
  std::vector<Eigen::Vector3d> xs, eph, eth;
  d.weights.resize(d.nodes);
  int node = 0;
  for (int j = 0; j < nth; ++j) {
    const double th = std::acos(z(j));
    for (int k = 0; k < nph; ++k, ++node) {
      const double ph = 2 * kPi * k / nph;
      for (int l = 0; l <= band; ++l)
        for (int m = -l; m <= l; ++m)
          y(node, l * l + l + m) = boost::math::spherical_harmonic<double, double>(l, m, th, ph);
      d.weights(node) = wz(j) * 2 * kPi / nph * radius * radius;
      d.coords.push_back({th, ph});
      const Eigen::Vector3d x(std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th));
      xs.push_back(x);
      eph.emplace_back(-std::sin(ph), std::cos(ph), 0.0);
      eth.emplace_back(std::cos(th) * std::cos(ph), std::cos(th) * std::sin(ph), -std::sin(th));
      // Frame (e_phi, e_theta, nu = -x) is positively oriented.
      RMatrix f = RMatrix::Zero(2, 2);
      f(0, 1) = 1.0 / (radius * std::sin(th));
      f(1, 0) = 1.0 / radius;
      d.chart_frame.push_back(f);
    }
  }
  d.unit_position = xs;

  // Angular momentum L = -i x cross grad acting on Y_lm (Condon-Shortley phase).
  CMatrix lp = CMatrix::Zero(nlm, nlm), lm_ = CMatrix::Zero(nlm, nlm), lz = CMatrix::Zero(nlm, nlm);
  for (int l = 0; l <= band; ++l)
    for (int m = -l; m <= l; ++m) {
      const int idx = l * l + l + m;
      lz(idx, idx) = m;
      if (m < l) lp(idx + 1, idx) = std::sqrt(double((l - m) * (l + m + 1)));
      if (m > -l) lm_(idx - 1, idx) = std::sqrt(double((l + m) * (l - m + 1)));
    }
  const std::array<CMatrix, 3> ang = {0.5 * (lp + lm_), (lp - lm_) / (2.0 * kI), lz};
  std::array<CMatrix, 3> yl;
  for (int c = 0; c < 3; ++c) yl[c] = y * ang[c];

  const CMatrix id_s = CMatrix::Identity(d.s, d.s);
  d.eval = kron(y, id_s);
  std::array<CMatrix, 2> grad = {CMatrix(d.nodes, nlm), CMatrix(d.nodes, nlm)};
  d.H.resize(d.nodes);
  d.R.resize(d.nodes);
  std::vector<CMatrix> conn0, conn1;
  for (int p = 0; p < d.nodes; ++p) {
    const std::array<Eigen::Vector3d, 2> e = {eph[p], eth[p]};
    std::vector<CMatrix> amb_e, tan;
    const CMatrix nu = -amb.vector_action({xs[p](0), xs[p](1), xs[p](2)});
    for (int i = 0; i < 2; ++i) {
      // d_{e_i} f = (-i/r) sum_c (e_i x xhat)_c (L_c f)
      const Eigen::Vector3d w = e[i].cross(xs[p]);
      grad[i].row(p) = (-kI / radius) * (w(0) * yl[0].row(p) + w(1) * yl[1].row(p) + w(2) * yl[2].row(p));
      amb_e.push_back(amb.vector_action({e[i](0), e[i](1), e[i](2)}));
      tan.push_back(amb_e.back() * nu);
    }
    d.ambient_e.push_back(amb_e);
    d.ambient_nu.push_back(nu);
    d.tangent.push_back(tan);
    d.h.push_back(d.model.h_at(d.coords[p]));
    d.H(p) = d.model.H_at(d.coords[p]);
    d.R(p) = d.model.R_at(d.coords[p]);
    // Intrinsic connection from the flat ambient realization of radius r:
    // nabla_X = d_X - (1/2r) X . nu .
    conn0.push_back(-0.5 / radius * tan[0]);
    conn1.push_back(-0.5 / radius * tan[1]);
  }
  d.lift = CMatrix::Identity(2, 2);
  d.nabla = {kron(grad[0], id_s) + pointwise(conn0, d.eval, d.s),
             kron(grad[1], id_s) + pointwise(conn1, d.eval, d.s)};
}

struct ChartValue {
  double value = 0.0;
  Eigen::Vector2d grad = Eigen::Vector2d::Zero();
  double lap_flat = 0.0;  // second derivatives summed in chart coordinates
  double d2 = 0.0;        // second derivative in the first chart coordinate (curves)
};

ChartValue chart_term(const Discretization& d, const ScalarTerm& term, std::size_t node) {
  ChartValue out;
  const auto& x = d.coords[node];
  const ModelKind kind = d.model.kind;
  const bool sphere = kind == ModelKind::sphere2 || kind == ModelKind::geodesic_sphere_S3;
  if (term.type == "constant") {
    out.value = term.amplitude;
    return out;
  }
  if (term.type == "coord") {
    if (!sphere) throw ConfigError("scalar term 'coord' is only defined on spheres");
    if (term.axis < 0 || term.axis > 2) throw ConfigError("scalar term 'coord': axis must be 0, 1 or 2");
    out.value = term.amplitude * d.unit_position[node](term.axis);
    return out;  // derivatives handled by the caller
  }
  if (term.type != "cos" && term.type != "sin")
    throw ConfigError("scalar term type must be constant, cos, sin or coord; got '" + term.type + "'");
  if (sphere) throw ConfigError("scalar term '" + term.type + "' is not defined on spheres");
  double p1 = 2 * kPi, p2 = 2 * kPi;
  if (kind == ModelKind::flat_torus2) {
    p1 = d.model.param(0);
    p2 = d.model.param(1);
  }
  const double w1 = 2 * kPi * term.k1 / p1;
  const double w2 = d.n == 2 ? 2 * kPi * term.k2 / p2 : 0.0;
  const double arg = w1 * x[0] + (d.n == 2 ? w2 * x[1] : 0.0);
  const double a = term.amplitude;
  const double c = std::cos(arg), s = std::sin(arg);
  if (term.type == "cos") {
    out.value = a * c;
    out.grad = Eigen::Vector2d(-a * s * w1, -a * s * w2);
    out.lap_flat = -a * c * (w1 * w1 + w2 * w2);
    out.d2 = -a * c * w1 * w1;
  } else {
    out.value = a * s;
    out.grad = Eigen::Vector2d(a * c * w1, a * c * w2);
    out.lap_flat = -a * s * (w1 * w1 + w2 * w2);
    out.d2 = -a * s * w1 * w1;
  }
  return out;
}

}  // namespace

const char* to_string(BasisKind b) {
  switch (b) {
    case BasisKind::fourier_antiperiodic: return "fourier_antiperiodic";
    case BasisKind::fourier_periodic: return "fourier_periodic";
    case BasisKind::spherical_harmonic: return "spherical_harmonic";
  }
  return "unknown";
}

BasisKind basis_kind_from_string(const std::string& s) {
  if (s == "fourier_antiperiodic") return BasisKind::fourier_antiperiodic;
  if (s == "fourier_periodic") return BasisKind::fourier_periodic;
  if (s == "spherical_harmonic") return BasisKind::spherical_harmonic;
  throw ConfigError("discretization.basis: unknown basis '" + s + "'");
}

bool ScalarSpec::is_zero() const {
  for (const auto& t : terms)
    if (t.amplitude != 0.0) return false;
  return true;
}

std::pair<RVector, RVector> gauss_legendre(int count) {
  // Golub-Welsch: eigen-decomposition of the Jacobi matrix.
  RMatrix jac = RMatrix::Zero(count, count);
  for (int k = 1; k < count; ++k) {
    const double b = k / std::sqrt(4.0 * k * k - 1.0);
    jac(k, k - 1) = jac(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<RMatrix> es(jac);
  RVector w(count);
  for (int k = 0; k < count; ++k) w(k) = 2.0 * es.eigenvectors()(0, k) * es.eigenvectors()(0, k);
  return {es.eigenvalues(), w};
}

CMatrix pointwise(const std::vector<CMatrix>& per_node, const CMatrix& x, int s_in) {
  const auto count = static_cast<Eigen::Index>(per_node.size());
  const Eigen::Index s_out = per_node.front().rows();
  CMatrix out(count * s_out, x.cols());
  for (Eigen::Index p = 0; p < count; ++p)
    out.middleRows(p * s_out, s_out).noalias() = per_node[p] * x.middleRows(p * s_in, s_in);
  return out;
}

CMatrix scale_rows(const RVector& per_node, const CMatrix& x, int s) {
  return repeat(per_node, s).cast<cplx>().asDiagonal() * x;
}

CMatrix to_coefficient_space(const Discretization& d, const CMatrix& nodal_map) {
  if (d.collocation) return nodal_map;
  const RVector ws = repeat(d.weights, d.s);
  return d.gram.ldlt().solve(d.eval.adjoint() * ws.asDiagonal() * nodal_map);
}

CVector Discretization::project(const CVector& nodal) const {
  if (collocation) return nodal;
  const RVector ws = repeat(weights, s);
  return gram.ldlt().solve(eval.adjoint() * ws.asDiagonal() * nodal);
}

std::vector<CMatrix> Discretization::tangent_column(int i) const {
  std::vector<CMatrix> out;
  out.reserve(tangent.size());
  for (const auto& t : tangent) out.push_back(t[static_cast<std::size_t>(i)]);
  return out;
}

CMatrix nodal_dirac(const Discretization& d) {
  CMatrix out = CMatrix::Zero(d.nodes * d.s, d.dim);
  for (int i = 0; i < d.n; ++i) out += pointwise(d.tangent_column(i), d.nabla[i], d.s);
  return out;
}

int Discretization::max_band() const {
  switch (basis) {
    case BasisKind::fourier_antiperiodic: return resolution / 2 - 1;
    case BasisKind::fourier_periodic: return (resolution - 1) / 2;
    case BasisKind::spherical_harmonic: return resolution;
  }
  return 0;
}

CMatrix Discretization::band_vectors(int band) const {
  std::vector<CVector> cols;
  if (basis == BasisKind::spherical_harmonic) {
    for (int l = 0; l <= std::min(band, resolution); ++l)
      for (int m = -l; m <= l; ++m)
        for (int c = 0; c < s; ++c) {
          CVector v = CVector::Zero(dim);
          v((l * l + l + m) * s + c) = 1.0;
          cols.push_back(v);
        }
  } else {
    const bool anti = basis == BasisKind::fourier_antiperiodic;
    const auto modes = fourier_modes(resolution, anti);
    std::vector<double> keep;
    for (double k : modes)
      if (std::abs(k) <= band + (anti ? 0.5 : 0.0)) keep.push_back(k);
    // Plane waves evaluated in the root (flat) chart; conformal children share the grid.
    if (n == 1) {
      for (double k : keep) {
        CVector v(dim);
        for (int j = 0; j < nodes; ++j) v(j) = std::polar(1.0, k * coords[j][0]);
        cols.push_back(v);
      }
    } else {
      double p1 = 2 * kPi, p2 = 2 * kPi;
      if (model.kind == ModelKind::flat_torus2) {
        p1 = model.param(0);
        p2 = model.param(1);
      }
      for (double k1 : keep)
        for (double k2 : keep)
          for (int c = 0; c < s; ++c) {
            CVector v = CVector::Zero(dim);
            for (int p = 0; p < nodes; ++p)
              v(p * s + c) = std::polar(1.0, 2 * kPi * (k1 * coords[p][0] / p1 + k2 * coords[p][1] / p2));
            cols.push_back(v);
          }
    }
  }
  CMatrix v0(dim, static_cast<Eigen::Index>(cols.size()));
  for (std::size_t c = 0; c < cols.size(); ++c) v0.col(static_cast<Eigen::Index>(c)) = cols[c];
  CMatrix g = v0.adjoint() * gram * v0;
  g = 0.5 * (g + g.adjoint()).eval();
  Eigen::LLT<CMatrix> llt(g);
  // V = V0 L^{-H} is orthonormal in the weighted product.
  CMatrix v = llt.matrixU().solve<Eigen::OnTheRight>(v0);
  return v;
}

ScalarField Discretization::scalar(const ScalarSpec& spec) const {
  ScalarField out;
  if (parent) {
    const ScalarField base = parent->scalar(spec);
    const ScalarField& u = *conformal_factor;
    out.value = base.value;
    out.grad.resize(nodes, n);
    out.laplacian.resize(nodes);
    for (int p = 0; p < nodes; ++p) {
      const double em = std::exp(-u.value(p));
      out.grad.row(p) = em * base.grad.row(p);
      const double cross = u.grad.row(p).dot(base.grad.row(p));
      out.laplacian(p) = em * em * (base.laplacian(p) + (n - 2) * cross);
    }
    return out;
  }
  out.value = RVector::Zero(nodes);
  out.grad = RMatrix::Zero(nodes, n);
  out.laplacian = RVector::Zero(nodes);
  const bool sphere = model.kind == ModelKind::sphere2 || model.kind == ModelKind::geodesic_sphere_S3;
  for (int p = 0; p < nodes; ++p) {
    for (const auto& term : spec.terms) {
      const ChartValue cv = chart_term(*this, term, static_cast<std::size_t>(p));
      out.value(p) += cv.value;
      if (term.type == "constant") continue;
      if (sphere) {
        // Restriction of a linear function: gradient is the tangential part of the axis vector,
        // and it is an l = 1 eigenfunction of the Laplacian.
        const Eigen::Vector3d& x = unit_position[p];
        const double th = coords[p][0], ph = coords[p][1];
        const Eigen::Vector3d eph(-std::sin(ph), std::cos(ph), 0.0);
        const Eigen::Vector3d eth(std::cos(th) * std::cos(ph), std::cos(th) * std::sin(ph), -std::sin(th));
        out.grad(p, 0) += term.amplitude * eph(term.axis) / sphere_radius;
        out.grad(p, 1) += term.amplitude * eth(term.axis) / sphere_radius;
        out.laplacian(p) += -2.0 * term.amplitude * x(term.axis) / (sphere_radius * sphere_radius);
        continue;
      }
      const RMatrix& f = chart_frame[p];
      if (n == 1) {
        const double inv_v = f(0, 0);
        out.grad(p, 0) += inv_v * cv.grad(0);
        double dv = 0.0;  // d(speed)/dt
        if (model.kind == ModelKind::ellipse) {
          const double a = model.param(0), b = model.param(1), t = coords[p][0];
          dv = (a * a - b * b) * std::sin(t) * std::cos(t) * inv_v;
        }
        out.laplacian(p) += inv_v * inv_v * cv.d2 - dv * inv_v * inv_v * inv_v * cv.grad(0);
      } else {
        out.grad.row(p) += (f * cv.grad).transpose();
        out.laplacian(p) += cv.lap_flat;
      }
    }
  }
  return out;
}

BasisKind default_basis(const HypersurfaceModel& model) {
  switch (model.kind) {
    case ModelKind::circle:
    case ModelKind::ellipse: return BasisKind::fourier_antiperiodic;
    case ModelKind::sphere2:
    case ModelKind::geodesic_sphere_S3: return BasisKind::spherical_harmonic;
    default: return BasisKind::fourier_periodic;
  }
}

DiscretizationPtr discretize(const HypersurfaceModel& model, int resolution, std::optional<BasisKind> basis) {
  const BasisKind b = basis.value_or(default_basis(model));
  const bool sphere = model.kind == ModelKind::sphere2 || model.kind == ModelKind::geodesic_sphere_S3;
  const bool curve = model.n == 1;
  if ((sphere && b != BasisKind::spherical_harmonic) || (curve && b == BasisKind::spherical_harmonic) ||
      (!sphere && !curve && b != BasisKind::fourier_periodic))
    throw ConfigError(std::string("discretization.basis: ") + to_string(b) + " is not supported on " +
                      to_string(model.kind));
  if (model.kind == ModelKind::conformal_torus2) {
    const HypersurfaceModel flat = make_model(ModelKind::flat_torus2, {2 * kPi, 2 * kPi});
    auto base = discretize(flat, resolution, b);
    ScalarSpec w;
    w.terms.push_back({"cos", model.param(0), 1, 0, 0});
    auto conf = conformal_transform(base, w);
    auto out = std::make_shared<Discretization>(*conf);
    out->model = model;
    return out;
  }
  auto d = std::make_shared<Discretization>();
  d->model = model;
  d->basis = b;
  d->resolution = resolution;
  if (curve)
    build_curve(*d, b == BasisKind::fourier_antiperiodic);
  else if (sphere)
    build_sphere(*d, model.kind == ModelKind::sphere2 ? model.param(0) : std::sin(model.param(0)));
  else
    build_torus(*d, model.param(0), model.param(1));
  finalize(*d);
  return d;
}

DiscretizationPtr conformal_transform(const DiscretizationPtr& base, const ScalarSpec& u_spec) {
  const int n = base->n;
  if (n > 2) throw ConfigError("conformal_transform: only n = 1, 2 are supported");
  auto d = std::make_shared<Discretization>(*base);
  const ScalarField u = base->scalar(u_spec);
  RVector em(base->nodes), e_nu(base->nodes);
  std::vector<std::vector<CMatrix>> corr(static_cast<std::size_t>(n));
  const CMatrix id = CMatrix::Identity(base->s, base->s);
  for (int p = 0; p < base->nodes; ++p) {
    em(p) = std::exp(-u.value(p));
    e_nu(p) = std::exp(n * u.value(p));
    CMatrix cdu = CMatrix::Zero(base->s, base->s);
    for (int j = 0; j < n; ++j) cdu += u.grad(p, j) * base->tangent[p][j];
    for (int i = 0; i < n; ++i) corr[i].push_back(0.5 * base->tangent[p][i] * cdu + 0.5 * u.grad(p, i) * id);
  }
  for (int i = 0; i < n; ++i)
    d->nabla[i] = scale_rows(em, base->nabla[i] - pointwise(corr[i], base->eval, base->s), base->s);
  d->weights = base->weights.cwiseProduct(e_nu);
  for (int p = 0; p < base->nodes; ++p) {
    d->H(p) = em(p) * base->H(p);
    if (d->has_h()) d->h[p] = em(p) * base->h[p];
    d->R(p) = n == 1 ? 0.0 : em(p) * em(p) * (base->R(p) - 2.0 * u.laplacian(p));
  }
  d->momenta.clear();
  d->dirac_override.reset();
  if (base->collocation) {
    const CMatrix dbase = base->dirac_override ? *base->dirac_override : nodal_dirac(*base);
    RVector left(base->nodes), right(base->nodes);
    for (int p = 0; p < base->nodes; ++p) {
      left(p) = std::exp(-0.5 * (n + 1) * u.value(p));
      right(p) = std::exp(0.5 * (n - 1) * u.value(p));
    }
    CMatrix m = scale_rows(left, dbase, base->s);
    m = (m * repeat(right, base->s).cast<cplx>().asDiagonal()).eval();
    d->dirac_override = m;
  }
  d->parent = base;
  d->conformal_factor = u;
  finalize(*d);
  return d;
}

CVector random_coefficients(const Discretization& d, std::mt19937_64& rng, int band) {
  const CMatrix v = d.band_vectors(band);
  std::normal_distribution<double> g(0.0, 1.0);
  CVector c(v.cols());
  for (Eigen::Index k = 0; k < c.size(); ++k) c(k) = cplx(g(rng), g(rng));
  CVector out = v * c;
  return out / d.norm(out);
}

}  // namespace spinbound
