#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "spinbound/types.hpp"

namespace spinbound {

enum class ModelKind { circle, ellipse, sphere2, geodesic_sphere_S3, flat_torus2, conformal_torus2 };

const char* to_string(ModelKind k);
ModelKind model_kind_from_string(const std::string& s);
std::vector<std::string> model_kind_names();

/// Parameter names accepted by make_model for each kind, in positional order.
std::vector<std::string> model_param_names(ModelKind k);

/// Geometry sampled on a uniform parameter grid.
struct GeometrySample {
  std::vector<std::vector<double>> coords;  // chart coordinates per point
  std::vector<RMatrix> metric;              // chart metric coefficients g_ab
  std::vector<RMatrix> h;                   // second fundamental form in an orthonormal frame
  RVector H;                                // trace of h
  RVector R;                                // scalar curvature
};

/// A model hypersurface M in flat space or the round S^3, or an intrinsic-only surface.
///
/// Conventions: the unit normal points inward on the convex models, so H >= 0 there, and
/// H is the trace of h (not the average).
struct HypersurfaceModel {
  ModelKind kind = ModelKind::circle;
  std::vector<double> params;
  int n = 1;
  bool has_embedding = false;  // stored embedding into flat R^{n+1}
  bool has_h = false;          // second fundamental form available
  int normal_orientation = +1; // +1: inward normal

  double param(std::size_t i) const { return params.at(i); }

  // Chart-level analytic data. Coordinates: t for curves, (theta, phi) for spheres, (x, y) for tori.
  RMatrix metric_at(const std::vector<double>& x) const;
  RMatrix h_at(const std::vector<double>& x) const;  // orthonormal frame of the chart
  double H_at(const std::vector<double>& x) const;
  double R_at(const std::vector<double>& x) const;
  /// Embedding point, only for has_embedding.
  Eigen::VectorXd embed(const std::vector<double>& x) const;
  Eigen::VectorXd normal_at(const std::vector<double>& x) const;

  GeometrySample sample(int resolution) const;
  std::string describe() const;
};

/// Params follow model_param_names(kind); missing trailing values use defaults.
HypersurfaceModel make_model(ModelKind kind, const std::vector<double>& params);

/// Max over the grid of |D~_i e_j - D_i e_j - h_ij nu| with derivatives of the embedding taken by
/// central differences of step 2*pi/resolution. nullopt for models without a stored embedding.
std::optional<double> gauss_formula_residual(const HypersurfaceModel& model, int resolution);

/// Curvature of t -> (a cos t, b sin t).
double ellipse_curvature(double a, double b, double t);

/// Speed |gamma'(t)| of the same parametrization.
double ellipse_speed(double a, double b, double t);

/// Perimeter of the ellipse by periodic trapezoid rule.
double ellipse_perimeter(double a, double b);

}  // namespace spinbound
