#pragma once

#include <optional>
#include <string>
#include <vector>

#include "spinbound/connections.hpp"

namespace spinbound {

enum class TheoremId { thm1_1, thm1_2, zhang4_1, hijazi_zhang6_1, friedrich, hijazi_em, df_prop1, df_prop2, df_prop3 };

const char* to_string(TheoremId t);
TheoremId theorem_from_string(const std::string& s);
const std::vector<TheoremId>& all_theorems();
/// Operator each theorem is stated for.
OperatorKind theorem_operator(TheoremId t);
bool theorem_is_conformal(TheoremId t);

inline constexpr double kEqualityRelative = 1e-6;
inline constexpr double kSoundnessTolerance = 1e-7;
inline constexpr double kParallelResidual = 1e-6;

enum class Verdict { pass, fail, not_applicable };
const char* to_string(Verdict v);

struct BoundReport {
  TheoremId theorem = TheoremId::thm1_1;
  Status status = Status::not_applicable;
  double lambda = 0.0;
  double lambda_sq = 0.0;
  double rhs = 0.0;
  double margin = 0.0;
  bool equality = false;
  /// Modified-connection (or Killing / EM) residual; absent when the parameters are undefined.
  std::optional<double> residual;
  std::string residual_kind;
  double em_residual = 0.0;
  double background_min = 0.0;
  double background_max = 0.0;
  bool background_constant = false;
  double mask_fraction = 0.0;
  Verdict sign = Verdict::not_applicable;

  /// Soundness: margin >= -1e-7 whenever the hypothesis holds (strict or boundary).
  bool sound() const {
    return !(status == Status::strict || status == Status::boundary) || margin >= -kSoundnessTolerance;
  }
  /// Equality flag agrees with the vanishing of the residual (skipped when it is unavailable).
  Verdict equality_consistency() const;
};

struct BoundExtras {
  std::optional<ScalarSpec> u;  // conformal factor for thm1_2, hijazi_zhang6_1, df_prop3 (zero if absent)
};

/// Scalar R-bar e^{2u} = R - 2(n-1) Lap u - (n-2)(n-1)|du|^2 (0 for n = 1).
RVector conformal_scalar(const Discretization& d, const ScalarField& u);

/// Evaluate one theorem for an eigenpair of `op`. Throws ConfigError if `op` is not the operator
/// the theorem is stated for.
BoundReport evaluate_bound(TheoremId theorem, const DiscreteOperator& op, double lambda, const SpinorField& phi,
                           const BoundExtras& extras = {});

/// sign(lambda) = sign(background) at strict equality with a constant-sign background.
Verdict sign_diagnostics(const BoundReport& report);

struct ImprovementRecord {
  Status thm1_status = Status::not_applicable;
  Status zhang_status = Status::not_applicable;
  double rhs_thm1 = 0.0;
  double rhs_zhang = 0.0;
  double killing_residual = 0.0;
  bool killing = false;
  /// Set when phi is a Killing spinor: whether the two right-hand sides agree to 1e-7.
  std::optional<bool> bounds_agree;
};

ImprovementRecord improvement_comparison(const DiscreteOperator& op, double lambda, const SpinorField& phi);

/// Relative L2 norm of nabla_i phi + (mu/n) e_i . nu . phi, mu the D-eigenvalue.
double killing_residual(const SpinorField& phi, double mu);

}  // namespace spinbound
