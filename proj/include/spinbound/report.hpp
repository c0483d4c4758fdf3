#pragma once

#include <string>
#include <vector>

#include "spinbound/conformal.hpp"
#include "spinbound/scenario.hpp"

namespace spinbound {

inline constexpr const char* kArtifactVersion = "1.0.0";
/// Eigenpairs with |A phi - lambda phi| below this times max(1, |lambda|) enter the soundness gate.
inline constexpr double kCertifiedResidual = 1e-8;

struct ModeRecord {
  int index = 0;
  double lambda = 0.0;
  double residual = 0.0;
  bool certified = false;
};

/// Identity or diagnostic check. `mode` is -1 for operator-level checks. Diagnostics (em_spinor, wem)
/// carry verdict not_applicable and report certification through `status`.
struct CheckRecord {
  std::string id;
  int mode = -1;
  double value = 0.0;
  double tolerance = 0.0;
  Status status = Status::not_applicable;
  Verdict verdict = Verdict::not_applicable;
  std::string note;
};

struct BoundRecord {
  int mode = 0;
  bool certified = false;
  BoundReport report;
  std::optional<ScalarSpec> u;
};

struct OptimizerRecord {
  int mode = 0;
  TheoremId theorem = TheoremId::thm1_2;
  OptimizeResult result;
};

struct RunReport {
  Scenario scenario;
  std::string model_label;
  std::vector<ModeRecord> spectrum;
  std::vector<CheckRecord> checks;
  std::vector<BoundRecord> bounds;
  std::vector<OptimizerRecord> optimizer;
  double seconds = 0.0;
  int soundness_violations = 0;
  int check_failures = 0;
  /// fail exactly when a certified eigenpair breaks a bound whose hypothesis holds.
  Verdict verdict = Verdict::pass;
};

RunReport run_scenario(const Scenario& sc);

/// Report JSON. Everything except the "timing" object is byte-stable for a fixed scenario.
nlohmann::json report_to_json(const RunReport& r);

enum class TableFormat { csv, md };
TableFormat table_format_from_string(const std::string& s);

/// Fixed column order of the bound table.
const std::vector<std::string>& table_columns();

/// One row per (model, mode, theorem) taken from the "bounds" array of a report JSON.
std::string emit_table(const nlohmann::json& report, TableFormat format);

/// One-paragraph human summary for standard output.
std::string summarize(const RunReport& r);

}  // namespace spinbound
