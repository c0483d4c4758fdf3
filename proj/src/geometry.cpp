#include "spinbound/geometry.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace spinbound {

namespace {
constexpr double kPi = std::numbers::pi;

struct KindInfo {
  ModelKind kind;
  const char* name;
  std::vector<std::string> params;
  std::vector<double> defaults;
};

const std::vector<KindInfo>& kind_table() {
  static const std::vector<KindInfo> table = {
      {ModelKind::circle, "circle", {"r"}, {1.0}},
      {ModelKind::ellipse, "ellipse", {"a", "b"}, {2.0, 1.0}},
      {ModelKind::sphere2, "sphere2", {"r"}, {1.0}},
      {ModelKind::geodesic_sphere_S3, "geodesic_sphere_S3", {"rho"}, {kPi / 3}},
      {ModelKind::flat_torus2, "flat_torus2", {"L1", "L2"}, {2 * kPi, 2 * kPi}},
      {ModelKind::conformal_torus2, "conformal_torus2", {"w"}, {0.2}},
  };
  return table;
}

const KindInfo& info(ModelKind k) {
  for (const auto& e : kind_table())
    if (e.kind == k) return e;
  throw ConfigError("unknown model kind");
}

Eigen::Vector3d sphere_point(double th, double ph) {
  return {std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th)};
}

}  // namespace

const char* to_string(ModelKind k) { return info(k).name; }

ModelKind model_kind_from_string(const std::string& s) {
  for (const auto& e : kind_table())
    if (s == e.name) return e.kind;
  throw ConfigError("model.kind: unknown model '" + s + "'");
}

std::vector<std::string> model_kind_names() {
  std::vector<std::string> out;
  for (const auto& e : kind_table()) out.emplace_back(e.name);
  return out;
}

std::vector<std::string> model_param_names(ModelKind k) { return info(k).params; }

double ellipse_speed(double a, double b, double t) {
  return std::sqrt(a * a * std::sin(t) * std::sin(t) + b * b * std::cos(t) * std::cos(t));
}

double ellipse_curvature(double a, double b, double t) {
  const double v = ellipse_speed(a, b, t);
  return a * b / (v * v * v);
}

double ellipse_perimeter(double a, double b) {
  const int n = 4096;
  double sum = 0.0;
  for (int j = 0; j < n; ++j) sum += ellipse_speed(a, b, 2 * kPi * j / n);
  return sum * 2 * kPi / n;
}

HypersurfaceModel make_model(ModelKind kind, const std::vector<double>& params) {
  const KindInfo& ki = info(kind);
  if (params.size() > ki.params.size())
    throw ConfigError(std::string("model.params: too many parameters for ") + ki.name);
  HypersurfaceModel m;
  m.kind = kind;
  m.params = ki.defaults;
  for (std::size_t i = 0; i < params.size(); ++i) m.params[i] = params[i];
  for (std::size_t i = 0; i < m.params.size(); ++i) {
    const double p = m.params[i];
    if (!std::isfinite(p)) throw ConfigError("model.params." + ki.params[i] + ": not finite");
    if (kind == ModelKind::conformal_torus2) continue;  // amplitude may take any sign
    if (p <= 0) throw ConfigError("model.params." + ki.params[i] + ": must be positive");
  }
  if (kind == ModelKind::geodesic_sphere_S3 && m.params[0] >= kPi)
    throw ConfigError("model.params.rho: must lie in (0, pi)");
  switch (kind) {
    case ModelKind::circle:
    case ModelKind::ellipse:
      m.n = 1;
      m.has_embedding = m.has_h = true;
      break;
    case ModelKind::sphere2:
      m.n = 2;
      m.has_embedding = m.has_h = true;
      break;
    case ModelKind::geodesic_sphere_S3:
      m.n = 2;
      m.has_h = true;
      break;
    case ModelKind::flat_torus2:
    case ModelKind::conformal_torus2:
      m.n = 2;
      break;
  }
  return m;
}

RMatrix HypersurfaceModel::metric_at(const std::vector<double>& x) const {
  switch (kind) {
    case ModelKind::circle: return RMatrix::Constant(1, 1, param(0) * param(0));
    case ModelKind::ellipse: {
      const double v = ellipse_speed(param(0), param(1), x[0]);
      return RMatrix::Constant(1, 1, v * v);
    }
    case ModelKind::sphere2:
    case ModelKind::geodesic_sphere_S3: {
      const double r = kind == ModelKind::sphere2 ? param(0) : std::sin(param(0));
      RMatrix g = RMatrix::Zero(2, 2);
      g(0, 0) = r * r;
      g(1, 1) = r * r * std::sin(x[0]) * std::sin(x[0]);
      return g;
    }
    case ModelKind::flat_torus2: return RMatrix::Identity(2, 2);
    case ModelKind::conformal_torus2:
      return std::exp(2 * param(0) * std::cos(x[0])) * RMatrix::Identity(2, 2);
  }
  return {};
}

RMatrix HypersurfaceModel::h_at(const std::vector<double>& x) const {
  if (!has_h) return {};
  switch (kind) {
    case ModelKind::circle: return RMatrix::Constant(1, 1, 1.0 / param(0));
    case ModelKind::ellipse: return RMatrix::Constant(1, 1, ellipse_curvature(param(0), param(1), x[0]));
    case ModelKind::sphere2: return RMatrix::Identity(2, 2) / param(0);
    case ModelKind::geodesic_sphere_S3:
      return RMatrix::Identity(2, 2) * (std::cos(param(0)) / std::sin(param(0)));
    default: return {};
  }
}

double HypersurfaceModel::H_at(const std::vector<double>& x) const {
  if (!has_h) return 0.0;
  return h_at(x).trace();
}

double HypersurfaceModel::R_at(const std::vector<double>& x) const {
  switch (kind) {
    case ModelKind::circle:
    case ModelKind::ellipse:
    case ModelKind::flat_torus2: return 0.0;
    case ModelKind::sphere2: return 2.0 / (param(0) * param(0));
    case ModelKind::geodesic_sphere_S3: return 2.0 / (std::sin(param(0)) * std::sin(param(0)));
    case ModelKind::conformal_torus2: {
      const double w = param(0) * std::cos(x[0]);
      return 2.0 * param(0) * std::cos(x[0]) * std::exp(-2.0 * w);
    }
  }
  return 0.0;
}

Eigen::VectorXd HypersurfaceModel::embed(const std::vector<double>& x) const {
  if (!has_embedding) throw ConfigError(std::string(to_string(kind)) + ": no stored embedding");
  switch (kind) {
    case ModelKind::circle: return Eigen::Vector2d(param(0) * std::cos(x[0]), param(0) * std::sin(x[0]));
    case ModelKind::ellipse: return Eigen::Vector2d(param(0) * std::cos(x[0]), param(1) * std::sin(x[0]));
    case ModelKind::sphere2: return param(0) * sphere_point(x[0], x[1]);
    default: return {};
  }
}

Eigen::VectorXd HypersurfaceModel::normal_at(const std::vector<double>& x) const {
  if (!has_embedding) throw ConfigError(std::string(to_string(kind)) + ": no stored embedding");
  switch (kind) {
    case ModelKind::circle: return -Eigen::Vector2d(std::cos(x[0]), std::sin(x[0]));
    case ModelKind::ellipse: {
      const double a = param(0), b = param(1), t = x[0];
      return -Eigen::Vector2d(b * std::cos(t), a * std::sin(t)) / ellipse_speed(a, b, t);
    }
    case ModelKind::sphere2: return -sphere_point(x[0], x[1]);
    default: return {};
  }
}

GeometrySample HypersurfaceModel::sample(int resolution) const {
  if (resolution < 2) throw ConfigError("resolution must be >= 2");
  GeometrySample s;
  auto push = [&](std::vector<double> x) {
    s.metric.push_back(metric_at(x));
    s.h.push_back(h_at(x));
    s.coords.push_back(std::move(x));
  };
  if (n == 1) {
    for (int j = 0; j < resolution; ++j) push({2 * kPi * j / resolution});
  } else if (kind == ModelKind::sphere2 || kind == ModelKind::geodesic_sphere_S3) {
    for (int j = 0; j < resolution; ++j)
      for (int k = 0; k < 2 * resolution; ++k)
        push({kPi * (j + 0.5) / resolution, 2 * kPi * k / (2 * resolution)});
  } else {
    const double l1 = kind == ModelKind::flat_torus2 ? param(0) : 2 * kPi;
    const double l2 = kind == ModelKind::flat_torus2 ? param(1) : 2 * kPi;
    for (int j = 0; j < resolution; ++j)
      for (int k = 0; k < resolution; ++k) push({l1 * j / resolution, l2 * k / resolution});
  }
  s.H.resize(static_cast<Eigen::Index>(s.coords.size()));
  s.R.resize(s.H.size());
  for (std::size_t i = 0; i < s.coords.size(); ++i) {
    s.H(static_cast<Eigen::Index>(i)) = H_at(s.coords[i]);
    s.R(static_cast<Eigen::Index>(i)) = R_at(s.coords[i]);
  }
  return s;
}

std::string HypersurfaceModel::describe() const {
  std::ostringstream os;
  os << to_string(kind) << "(";
  const auto names = model_param_names(kind);
  for (std::size_t i = 0; i < params.size(); ++i) os << (i ? ", " : "") << names[i] << "=" << params[i];
  os << ")";
  return os.str();
}

std::optional<double> gauss_formula_residual(const HypersurfaceModel& model, int resolution) {
  if (!model.has_embedding) return std::nullopt;
  if (resolution < 4) throw ConfigError("gauss_formula_residual: resolution must be >= 4");
  const double step = 2 * kPi / resolution;
  double worst = 0.0;
  if (model.n == 1) {
    auto tangent = [&](double t) {
      Eigen::VectorXd d = (model.embed({t + step}) - model.embed({t - step})) / (2 * step);
      return std::pair<Eigen::VectorXd, double>(d.normalized(), d.norm());
    };
    for (int j = 0; j < resolution; ++j) {
      const double t = step * j;
      const auto [e, speed] = tangent(t);
      Eigen::VectorXd de = (tangent(t + step).first - tangent(t - step).first) / (2 * step * speed);
      // The intrinsic connection of a curve vanishes: D_1 e_1 = 0.
      Eigen::VectorXd r = de - model.h_at({t})(0, 0) * model.normal_at({t});
      worst = std::max(worst, r.norm());
    }
    return worst;
  }
  // Surface: chart (theta, phi); frame from finite-difference chart derivatives.
  auto frame = [&](double th, double ph) {
    Eigen::Vector3d dth = (model.embed({th + step, ph}) - model.embed({th - step, ph})) / (2 * step);
    Eigen::Vector3d dph = (model.embed({th, ph + step}) - model.embed({th, ph - step})) / (2 * step);
    std::array<Eigen::Vector3d, 2> e{dth.normalized(), dph.normalized()};
    std::array<double, 2> len{dth.norm(), dph.norm()};
    return std::pair(e, len);
  };
  const int nth = resolution / 2;
  for (int j = 0; j < nth; ++j) {
    for (int k = 0; k < resolution; ++k) {
      const double th = kPi * (j + 0.5) / nth, ph = step * k;
      const auto [e, len] = frame(th, ph);
      Eigen::Vector3d nu = e[0].cross(e[1]);
      if (nu.dot(model.normal_at({th, ph}).head<3>()) < 0) nu = -nu;
      const RMatrix h = model.h_at({th, ph});
      for (int i = 0; i < 2; ++i) {
        for (int jj = 0; jj < 2; ++jj) {
          Eigen::Vector3d de;
          if (i == 0)
            de = (frame(th + step, ph).first[jj] - frame(th - step, ph).first[jj]) / (2 * step * len[0]);
          else
            de = (frame(th, ph + step).first[jj] - frame(th, ph - step).first[jj]) / (2 * step * len[1]);
          // Levi-Civita of the induced metric is the tangential part of the ambient derivative.
          Eigen::Vector3d tangential = de - de.dot(nu) * nu;
          Eigen::Vector3d r = de - tangential - h(i, jj) * nu;
          worst = std::max(worst, r.norm());
        }
      }
    }
  }
  return worst;
}

}  // namespace spinbound
