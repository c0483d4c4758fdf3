#include "spinbound/clifford.hpp"

#include <Eigen/SVD>

namespace spinbound {

const char* to_string(Status s) {
  switch (s) {
    case Status::strict: return "strict";
    case Status::boundary: return "boundary";
    case Status::violated: return "violated";
    case Status::not_applicable: return "not_applicable";
  }
  return "unknown";
}

namespace {

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

CMatrix pauli(int k) {
  CMatrix s(2, 2);
  switch (k) {
    case 1: s << 0, 1, 1, 0; break;
    case 2: s << 0, -kI, kI, 0; break;
    default: s << 1, 0, 0, -1; break;
  }
  return s;
}

// Hermitian generators squaring to +1, built two dimensions at a time.
std::vector<CMatrix> hermitian_even(int m) {
  std::vector<CMatrix> gam;
  int dim = 1;
  for (int step = 1; step <= m; ++step) {
    for (auto& g : gam) g = kron(g, pauli(3));
    CMatrix id = CMatrix::Identity(dim, dim);
    gam.push_back(kron(id, pauli(1)));
    gam.push_back(kron(id, pauli(2)));
    dim *= 2;
  }
  return gam;
}

cplx i_power(int k) {
  static const cplx table[4] = {1.0, kI, -1.0, -kI};
  return table[((k % 4) + 4) % 4];
}

}  // namespace

CMatrix GammaSet::vector_action(const std::vector<double>& x) const {
  CMatrix out = CMatrix::Zero(dim_spinor, dim_spinor);
  for (std::size_t i = 0; i < x.size() && i < generators.size(); ++i) out += x[i] * generators[i];
  return out;
}

GammaSet build_gamma(int n) {
  if (n < 1) throw ConfigError("build_gamma: dimension must be >= 1, got " + std::to_string(n));
  const int m = n / 2;
  std::vector<CMatrix> herm = hermitian_even(m);
  const int dim = 1 << m;
  if (n % 2 == 1) {
    CMatrix prod = CMatrix::Identity(dim, dim);
    for (const auto& g : herm) prod = prod * g;
    // (i^m G_1...G_2m)^2 = 1 and it anticommutes with every G_k.
    herm.push_back(i_power(m) * prod);
  }
  GammaSet out;
  out.n = n;
  out.dim_spinor = dim;
  for (auto& g : herm) out.generators.push_back(kI * g);
  if (n % 2 == 1) {
    CMatrix w = volume_element(out);
    if (std::real(w(0, 0)) < 0) out.generators.back() *= -1.0;
  }
  return out;
}

CMatrix volume_element(const GammaSet& g) {
  CMatrix w = g.identity();
  for (const auto& e : g.generators) w = w * e;
  return i_power((g.n + 1) / 2) * w;
}

GammaSet alpha_embed(const GammaSet& ambient) {
  if (ambient.n < 2) throw ConfigError("alpha_embed: ambient dimension must be >= 2");
  GammaSet out;
  out.n = ambient.n - 1;
  out.dim_spinor = ambient.dim_spinor;
  const CMatrix& nu = ambient.generators.back();
  for (int i = 0; i < out.n; ++i) out.generators.push_back(ambient[i] * nu);
  return out;
}

std::optional<CMatrix> find_intertwiner(const GammaSet& a, const GammaSet& b, double tol) {
  if (a.n != b.n || a.dim_spinor != b.dim_spinor)
    throw ConfigError("find_intertwiner: generator counts or spinor dimensions differ");
  const int d = a.dim_spinor;
  const CMatrix id = CMatrix::Identity(d, d);
  CMatrix sys(static_cast<Eigen::Index>(a.n) * d * d, d * d);
  for (int i = 0; i < a.n; ++i)
    sys.block(static_cast<Eigen::Index>(i) * d * d, 0, d * d, d * d) =
        kron(a[i].transpose(), id) - kron(id, b[i]);
  Eigen::JacobiSVD<CMatrix> svd(sys, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  if (sv(sv.size() - 1) > tol) return std::nullopt;
  CVector v = svd.matrixV().col(sv.size() - 1);
  CMatrix u0 = Eigen::Map<CMatrix>(v.data(), d, d);
  Eigen::JacobiSVD<CMatrix> polar(u0, Eigen::ComputeFullU | Eigen::ComputeFullV);
  CMatrix u = polar.matrixU() * polar.matrixV().adjoint();
  double res = 0.0;
  for (int i = 0; i < a.n; ++i) res = std::max(res, (u * a[i] - b[i] * u).cwiseAbs().maxCoeff());
  if (res > tol) return std::nullopt;
  return u;
}

ChiralitySplit chirality_split(const GammaSet& ambient) {
  if (ambient.n < 2) throw ConfigError("chirality_split: ambient dimension must be >= 2");
  ChiralitySplit out;
  const int n = ambient.n - 1;
  if (n % 2 == 0)
    out.defining_operator = kI * ambient.generators.back();
  else
    out.defining_operator = volume_element(ambient);
  const CMatrix id = ambient.identity();
  out.projector_plus = 0.5 * (id + out.defining_operator);
  out.projector_minus = 0.5 * (id - out.defining_operator);
  return out;
}

CMatrix projector_range(const CMatrix& projector) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (projector + projector.adjoint()));
  std::vector<Eigen::Index> keep;
  for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k)
    if (es.eigenvalues()(k) > 0.5) keep.push_back(k);
  CMatrix basis(projector.rows(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t c = 0; c < keep.size(); ++c) {
    CVector v = es.eigenvectors().col(keep[c]);
    // Deterministic phase: largest component real positive.
    Eigen::Index piv = 0;
    v.cwiseAbs().maxCoeff(&piv);
    v *= std::conj(v(piv)) / std::abs(v(piv));
    basis.col(static_cast<Eigen::Index>(c)) = v;
  }
  return basis;
}

GammaSet restrict_to(const GammaSet& g, const CMatrix& projector) {
  const CMatrix basis = projector_range(projector);
  GammaSet out;
  out.n = g.n;
  out.dim_spinor = static_cast<int>(basis.cols());
  for (const auto& e : g.generators) out.generators.push_back(basis.adjoint() * e * basis);
  return out;
}

double clifford_relation_defect(const GammaSet& g) {
  double worst = 0.0;
  const CMatrix id = g.identity();
  for (int i = 0; i < g.n; ++i) {
    worst = std::max(worst, (g[i].adjoint() * g[i] - id).cwiseAbs().maxCoeff());
    worst = std::max(worst, (g[i].adjoint() + g[i]).cwiseAbs().maxCoeff());
    for (int j = 0; j < g.n; ++j) {
      CMatrix ac = g[i] * g[j] + g[j] * g[i];
      if (i == j) ac += 2.0 * id;
      worst = std::max(worst, ac.cwiseAbs().maxCoeff());
    }
  }
  return worst;
}

}  // namespace spinbound
