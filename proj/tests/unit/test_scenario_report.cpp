#include <doctest.h>

#include <fstream>
#include <sstream>
#include <thread>

#include "spinbound/report.hpp"

using namespace spinbound;
using nlohmann::json;

namespace {

json base_config() {
  return json::parse(R"({
    "name": "t", "model": {"kind": "circle", "params": {"r": 1.0}},
    "discretization": {"resolution": 32}, "operator": {"kind": "D_H"},
    "modes": {"count": 5}, "checks": ["thm1_1", "hermiticity"], "seed": 3})");
}

std::string config_error(const json& j) {
  try {
    (void)parse_scenario(j);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

json stable(json j) {
  j.erase("timing");
  return j;
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::string cell;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      const char c = line[i];
      if (quoted) {
        if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
          cell += '"';
          ++i;
        } else if (c == '"') {
          quoted = false;
        } else {
          cell += c;
        }
      } else if (c == '"') {
        quoted = true;
      } else if (c == ',') {
        cells.push_back(cell);
        cell.clear();
      } else {
        cell += c;
      }
    }
    cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

}  // namespace

TEST_CASE("valid configuration parses with defaults") {
  const Scenario sc = parse_scenario(base_config());
  CHECK(sc.model == ModelKind::circle);
  CHECK(sc.params == std::vector<double>{1.0});
  CHECK(sc.resolution == 32);
  CHECK(sc.op == OperatorKind::D_H);
  CHECK(sc.count == 5);
  CHECK(sc.seed == 3);
  CHECK_FALSE(sc.u.has_value());
  const Scenario minimal = parse_scenario(json::parse(R"({"model": {"kind": "sphere2"}})"));
  CHECK(minimal.resolution == 12);
  CHECK(minimal.checks.empty());
}

TEST_CASE("configuration errors name the offending field") {
  json j = base_config();
  j["model"]["params"]["r"] = -1.0;
  CHECK(config_error(j).find("model.params.r") != std::string::npos);

  j = base_config();
  j["model"]["kind"] = "torus7";
  CHECK(config_error(j).find("model.kind") != std::string::npos);

  j = base_config();
  j["checks"] = {"thm1_1", "thm7"};
  CHECK(config_error(j).find("checks") != std::string::npos);

  j = base_config();
  j["tolerances"] = {{"lichnerowicz", 1e-20}};
  CHECK(config_error(j).find("tolerances.lichnerowicz") != std::string::npos);

  j = base_config();
  j["tolerances"] = {{"nonsense", 1e-3}};
  CHECK(config_error(j).find("tolerances.nonsense") != std::string::npos);

  j = base_config();
  j["modes"]["indices"] = {7};
  CHECK(config_error(j).find("modes.indices") != std::string::npos);

  j = base_config();
  j["extra"] = 1;
  CHECK(config_error(j).find("extra") != std::string::npos);

  j = base_config();
  j["operator"]["f"] = {{"terms", {{{"type", "tan"}, {"amplitude", 1.0}}}}};
  CHECK(config_error(j).find("operator.f.terms[0].type") != std::string::npos);

  j = base_config();
  j.erase("model");
  CHECK(config_error(j).find("model") != std::string::npos);

  j = base_config();
  j["conformal"] = {{"u", "guess"}};
  CHECK(config_error(j).find("conformal.u") != std::string::npos);
}

TEST_CASE("theorem stated for another operator is rejected at run time") {
  json j = base_config();
  j["checks"] = {"friedrich"};
  CHECK_THROWS_AS(run_scenario(parse_scenario(j)), ConfigError);
}

TEST_CASE("scalar specs round-trip through JSON") {
  ScalarSpec s;
  s.terms.push_back({"cos", 0.3, 1, 2, 0});
  s.terms.push_back({"coord", -0.1, 0, 0, 2});
  const ScalarSpec back = scalar_from_json(scalar_to_json(s), "u");
  REQUIRE(back.terms.size() == 2);
  CHECK(back.terms[0].type == "cos");
  CHECK(back.terms[0].k2 == 2);
  CHECK(back.terms[1].amplitude == -0.1);
  CHECK(scalar_from_json(json(2.5), "f").terms[0].amplitude == 2.5);
}

TEST_CASE("bundled circle scenario: three equalities, verdict pass") {
  const Scenario sc = load_scenario(SPINBOUND_SCENARIO_DIR "/circle_equality.json");
  const RunReport r = run_scenario(sc);
  CHECK(r.verdict == Verdict::pass);
  int eq = 0;
  for (const auto& b : r.bounds) eq += b.report.equality;
  CHECK(eq == 3);
  CHECK(r.check_failures == 0);
}

TEST_CASE("bundled sphere scenario: two boundary statuses, no violations") {
  const RunReport r = run_scenario(load_scenario(SPINBOUND_SCENARIO_DIR "/sphere_boundary.json"));
  CHECK(r.verdict == Verdict::pass);
  int boundary = 0, violated = 0;
  for (const auto& b : r.bounds) {
    boundary += b.report.status == Status::boundary;
    violated += b.report.status == Status::violated;
  }
  CHECK(boundary == 2);
  CHECK(violated == 0);
}

TEST_CASE("malformed bundled-style config on disk is a configuration error") {
  CHECK_THROWS_AS(load_scenario(SPINBOUND_TEST_DATA "/negative_radius.json"), ConfigError);
  CHECK_THROWS_AS(load_scenario(SPINBOUND_TEST_DATA "/does_not_exist.json"), ConfigError);
}

TEST_CASE("violated hypotheses and boundary cases never fail the verdict") {
  json j = base_config();
  j["model"] = {{"kind", "ellipse"}, {"params", {{"a", 2.0}, {"b", 1.0}}}};
  j["discretization"]["resolution"] = 128;
  j["modes"]["count"] = 5;
  const RunReport r = run_scenario(parse_scenario(j));
  int violated = 0;
  for (const auto& b : r.bounds) violated += b.report.status == Status::violated;
  CHECK(violated > 0);
  CHECK(r.verdict == Verdict::pass);
}

TEST_CASE("reports are deterministic and byte-identical under concurrency") {
  json j = base_config();
  j["checks"] = {"thm1_1", "qformula", "trace_identity", "integral_identity", "em_spinor"};
  const Scenario sc = parse_scenario(j);
  const std::string ref = stable(report_to_json(run_scenario(sc))).dump();
  CHECK(stable(report_to_json(run_scenario(sc))).dump() == ref);
  const Scenario sphere = load_scenario(SPINBOUND_SCENARIO_DIR "/sphere_boundary.json");
  const std::string ref_sphere = stable(report_to_json(run_scenario(sphere))).dump();
  std::vector<std::string> out(4);
  std::vector<std::thread> pool;
  for (int k = 0; k < 4; ++k)
    pool.emplace_back([&, k] { out[static_cast<std::size_t>(k)] = stable(report_to_json(run_scenario(k % 2 ? sphere : sc))).dump(); });
  for (auto& t : pool) t.join();
  for (int k = 0; k < 4; ++k) CHECK(out[static_cast<std::size_t>(k)] == (k % 2 ? ref_sphere : ref));
}

TEST_CASE("report JSON schema and round trip") {
  const RunReport r = run_scenario(load_scenario(SPINBOUND_SCENARIO_DIR "/circle_equality.json"));
  const json j = report_to_json(r);
  for (const char* key : {"artifact_version", "scenario", "spectrum", "checks", "bounds", "timing", "verdict"})
    CHECK(j.contains(key));
  CHECK(j["artifact_version"] == kArtifactVersion);
  CHECK(j["scenario"]["name"] == "circle_equality");
  const json back = json::parse(j.dump(2));
  CHECK(back == j);
}

TEST_CASE("CSV and Markdown tables: fixed columns, one row per bound, values preserved") {
  const RunReport r = run_scenario(load_scenario(SPINBOUND_SCENARIO_DIR "/circle_equality.json"));
  const json j = report_to_json(r);
  const auto rows = parse_csv(emit_table(j, TableFormat::csv));
  REQUIRE(rows.size() == 1 + r.bounds.size());
  CHECK(rows[0] == table_columns());
  for (std::size_t i = 0; i < r.bounds.size(); ++i) {
    const auto& row = rows[i + 1];
    REQUIRE(row.size() == table_columns().size());
    CHECK(row[2] == "thm1_1");
    CHECK(std::stod(row[3]) == r.bounds[i].report.lambda);
    CHECK(std::stod(row[5]) == r.bounds[i].report.rhs);
    CHECK(row[7] == to_string(r.bounds[i].report.status));
  }
  const std::string md = emit_table(j, TableFormat::md);
  std::istringstream in(md);
  std::string line;
  int lines = 0;
  while (std::getline(in, line)) {
    CHECK(line.front() == '|');
    ++lines;
  }
  CHECK(lines == 2 + static_cast<int>(r.bounds.size()));
  // A cell containing a comma is quoted in CSV.
  json odd = j;
  odd["bounds"][0]["model"] = "ellipse(a=2, b=1)";
  CHECK(parse_csv(emit_table(odd, TableFormat::csv))[1][0] == "ellipse(a=2, b=1)");
  CHECK_THROWS_AS(table_format_from_string("xlsx"), ConfigError);
}

TEST_CASE("identity checks are recorded with tolerances") {
  json j = base_config();
  j["checks"] = {"lichnerowicz", "witten", "qformula", "conformal_covariance", "wem"};
  j["conformal"] = {{"u", {{"terms", {{{"type", "sin"}, {"amplitude", 0.2}, {"k1", 1}}}}}}};
  j["tolerances"] = {{"qformula", 1e-8}};
  const RunReport r = run_scenario(parse_scenario(j));
  for (const auto& c : r.checks) {
    CAPTURE(c.id);
    if (c.id == "qformula") CHECK(c.tolerance == 1e-8);
    if (c.id == "wem") CHECK(c.verdict == Verdict::not_applicable);
    else CHECK(c.verdict == Verdict::pass);
  }
  CHECK(r.check_failures == 0);
}
