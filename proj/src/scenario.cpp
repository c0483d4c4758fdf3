#include "spinbound/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

namespace spinbound {

using nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& field, const std::string& why) {
  throw ConfigError("config field '" + field + "': " + why);
}

template <typename T>
T get(const json& j, const std::string& key, const std::string& field, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    bad(field + "." + key, "wrong type");
  }
}

const json& object_or_empty(const json& j, const std::string& key, const std::string& field) {
  static const json empty = json::object();
  if (!j.contains(key)) return empty;
  if (!j.at(key).is_object()) bad(field.empty() ? key : field + "." + key, "expected an object");
  return j.at(key);
}

void check_keys(const json& j, const std::string& field, std::initializer_list<const char*> allowed) {
  for (const auto& [key, _] : j.items())
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }))
      bad(field.empty() ? key : field + "." + key, "unknown key");
}

}  // namespace

const std::vector<std::string>& identity_check_ids() {
  static const std::vector<std::string> ids = {"lichnerowicz", "witten",      "hermiticity",       "trace_identity",
                                               "em_spinor",    "qtr",         "qformula",          "integral_identity",
                                               "wem",          "conformal_covariance"};
  return ids;
}

std::vector<std::string> all_check_ids() {
  std::vector<std::string> out;
  for (TheoremId t : all_theorems()) out.emplace_back(to_string(t));
  for (const auto& id : identity_check_ids()) out.push_back(id);
  return out;
}

double default_tolerance(const std::string& check) {
  static const std::map<std::string, double> tol = {
      {"lichnerowicz", 1e-8}, {"witten", 1e-8},   {"hermiticity", 1e-10},      {"trace_identity", 1e-10},
      {"em_spinor", 1e-6},    {"qtr", 1e-8},      {"qformula", 1e-9},          {"integral_identity", 1e-6},
      {"wem", 1e-7},          {"conformal_covariance", 1e-8}};
  const auto it = tol.find(check);
  if (it == tol.end()) throw ConfigError("no tolerance is defined for check '" + check + "'");
  return it->second;
}

ScalarSpec scalar_from_json(const json& j, const std::string& field) {
  if (j.is_number()) return ScalarSpec::constant(j.get<double>());
  if (!j.is_object() || !j.contains("terms") || !j.at("terms").is_array())
    bad(field, "expected a number or an object with a 'terms' array");
  ScalarSpec s;
  int idx = 0;
  for (const auto& t : j.at("terms")) {
    const std::string tf = field + ".terms[" + std::to_string(idx++) + "]";
    if (!t.is_object()) bad(tf, "expected an object");
    check_keys(t, tf, {"type", "amplitude", "k1", "k2", "axis"});
    ScalarTerm term;
    term.type = get<std::string>(t, "type", tf, "constant");
    if (term.type != "constant" && term.type != "cos" && term.type != "sin" && term.type != "coord")
      bad(tf + ".type", "unknown term type '" + term.type + "'");
    term.amplitude = get<double>(t, "amplitude", tf, 0.0);
    if (!std::isfinite(term.amplitude)) bad(tf + ".amplitude", "must be finite");
    term.k1 = get<int>(t, "k1", tf, 0);
    term.k2 = get<int>(t, "k2", tf, 0);
    term.axis = get<int>(t, "axis", tf, 0);
    if (term.axis < 0 || term.axis > 3) bad(tf + ".axis", "must be in 0..3");
    s.terms.push_back(term);
  }
  return s;
}

json scalar_to_json(const ScalarSpec& s) {
  json terms = json::array();
  for (const auto& t : s.terms)
    terms.push_back({{"type", t.type}, {"amplitude", t.amplitude}, {"k1", t.k1}, {"k2", t.k2}, {"axis", t.axis}});
  return {{"terms", terms}};
}

Scenario parse_scenario(const json& j) {
  if (!j.is_object()) bad("<root>", "expected an object");
  check_keys(j, "", {"name", "model", "discretization", "operator", "modes", "checks", "conformal", "tolerances",
                     "output", "seed"});
  Scenario sc;
  sc.source = j;
  sc.name = get<std::string>(j, "name", "", sc.name);
  sc.output = get<std::string>(j, "output", "", "");
  sc.seed = get<std::uint64_t>(j, "seed", "", 0);

  if (!j.contains("model")) bad("model", "missing");
  const json& m = object_or_empty(j, "model", "");
  check_keys(m, "model", {"kind", "params"});
  if (!m.contains("kind")) bad("model.kind", "missing");
  sc.model = model_kind_from_string(get<std::string>(m, "kind", "model", ""));
  const auto names = model_param_names(sc.model);
  if (m.contains("params")) {
    const json& p = m.at("params");
    if (p.is_array()) {
      if (p.size() > names.size()) bad("model.params", "too many values");
      for (const auto& v : p) {
        if (!v.is_number()) bad("model.params", "values must be numbers");
        sc.params.push_back(v.get<double>());
      }
    } else if (p.is_object()) {
      for (const auto& [key, _] : p.items())
        if (std::find(names.begin(), names.end(), key) == names.end())
          bad("model.params." + key, std::string("unknown parameter for ") + to_string(sc.model));
      // Positional: names before the last supplied one are required, later ones take defaults.
      std::size_t last = 0;
      for (std::size_t i = 0; i < names.size(); ++i)
        if (p.contains(names[i])) last = i + 1;
      for (std::size_t i = 0; i < last; ++i) {
        if (!p.contains(names[i])) bad("model.params." + names[i], "must be given when later parameters are");
        if (!p.at(names[i]).is_number()) bad("model.params." + names[i], "must be a number");
        sc.params.push_back(p.at(names[i]).get<double>());
      }
    } else {
      bad("model.params", "expected an object or an array");
    }
  }
  (void)make_model(sc.model, sc.params);

  const json& disc = object_or_empty(j, "discretization", "");
  check_keys(disc, "discretization", {"basis", "resolution"});
  if (disc.contains("basis")) {
    sc.basis = basis_kind_from_string(get<std::string>(disc, "basis", "discretization", ""));
  }
  const bool sphere = sc.model == ModelKind::sphere2 || sc.model == ModelKind::geodesic_sphere_S3;
  const bool torus = sc.model == ModelKind::flat_torus2 || sc.model == ModelKind::conformal_torus2;
  sc.resolution = get<int>(disc, "resolution", "discretization", sphere ? 12 : torus ? 15 : 64);
  if (sc.resolution < 1) bad("discretization.resolution", "must be positive");

  const json& op = object_or_empty(j, "operator", "");
  check_keys(op, "operator", {"kind", "f"});
  if (op.contains("kind")) {
    sc.op = operator_kind_from_string(get<std::string>(op, "kind", "operator", ""));
  }
  if (op.contains("f")) sc.f = scalar_from_json(op.at("f"), "operator.f");

  const json& modes = object_or_empty(j, "modes", "");
  check_keys(modes, "modes", {"count", "indices"});
  sc.count = get<int>(modes, "count", "modes", sc.count);
  if (sc.count < 1) bad("modes.count", "must be positive");
  sc.indices = get<std::vector<int>>(modes, "indices", "modes", {});
  for (int i : sc.indices)
    if (i < 0 || i >= sc.count) bad("modes.indices", "index " + std::to_string(i) + " outside 0..count-1");

  const auto ids = all_check_ids();
  sc.checks = get<std::vector<std::string>>(j, "checks", "", {});
  for (const auto& c : sc.checks)
    if (std::find(ids.begin(), ids.end(), c) == ids.end()) bad("checks", "unknown check id '" + c + "'");

  const json& conf = object_or_empty(j, "conformal", "");
  check_keys(conf, "conformal", {"u", "optimize", "budget", "band"});
  if (conf.contains("u")) {
    if (conf.at("u").is_string()) {
      if (conf.at("u").get<std::string>() != "optimize") bad("conformal.u", "the only string value is \"optimize\"");
      sc.optimize = true;
    } else {
      sc.u = scalar_from_json(conf.at("u"), "conformal.u");
    }
  }
  sc.optimize = get<bool>(conf, "optimize", "conformal", sc.optimize);
  sc.budget = get<int>(conf, "budget", "conformal", sc.budget);
  sc.band = get<int>(conf, "band", "conformal", sc.band);
  if (sc.budget < 1) bad("conformal.budget", "must be positive");
  if (sc.band < 1) bad("conformal.band", "must be positive");

  const json& tol = object_or_empty(j, "tolerances", "");
  for (const auto& [key, value] : tol.items()) {
    const auto& idc = identity_check_ids();
    if (std::find(idc.begin(), idc.end(), key) == idc.end()) bad("tolerances." + key, "unknown check id");
    if (!value.is_number()) bad("tolerances." + key, "must be a number");
    const double v = value.get<double>();
    if (!(v >= std::numeric_limits<double>::epsilon()) || !std::isfinite(v))
      bad("tolerances." + key, "must be finite and at least machine epsilon");
    sc.tolerances[key] = v;
  }
  return sc;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config '" + path + "' is not valid JSON: " + e.what());
  }
  return parse_scenario(j);
}

}  // namespace spinbound
