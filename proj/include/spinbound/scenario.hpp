#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "spinbound/bounds.hpp"

namespace spinbound {

/// One run configuration. JSON layout (all keys except `model` optional):
///
///   name, seed, output,
///   model {kind, params {name: value} or [values]},
///   discretization {basis, resolution},
///   operator {kind: D | D_H | D_f, f: scalar},
///   modes {count, indices},
///   checks [id...],
///   conformal {u: scalar, optimize, budget, band},
///   tolerances {check id: value}
///
/// A scalar is a number (constant) or {"terms": [{type, amplitude, k1, k2, axis}]}.
struct Scenario {
  std::string name = "scenario";
  ModelKind model = ModelKind::circle;
  std::vector<double> params;
  std::optional<BasisKind> basis;
  int resolution = 64;
  OperatorKind op = OperatorKind::D_H;
  ScalarSpec f;
  int count = 6;
  std::vector<int> indices;
  std::vector<std::string> checks;
  std::optional<ScalarSpec> u;
  bool optimize = false;
  int budget = 200;
  int band = 2;
  std::map<std::string, double> tolerances;
  std::string output;
  std::uint64_t seed = 0;
  nlohmann::json source;
};

/// Identity and diagnostic checks accepted besides the theorem ids.
const std::vector<std::string>& identity_check_ids();
/// Every accepted check id: theorems first, then identities.
std::vector<std::string> all_check_ids();
/// Default tolerance of an identity check; throws ConfigError for unknown ids.
double default_tolerance(const std::string& check);

ScalarSpec scalar_from_json(const nlohmann::json& j, const std::string& field);
nlohmann::json scalar_to_json(const ScalarSpec& s);

/// Validate and convert; ConfigError messages name the offending field.
Scenario parse_scenario(const nlohmann::json& j);
Scenario load_scenario(const std::string& path);

}  // namespace spinbound
