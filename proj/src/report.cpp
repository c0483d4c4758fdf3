#include "spinbound/report.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>

namespace spinbound {

using nlohmann::json;

namespace {

double tolerance_for(const Scenario& sc, const std::string& id) {
  const auto it = sc.tolerances.find(id);
  return it != sc.tolerances.end() ? it->second : default_tolerance(id);
}

CheckRecord residual_check(const std::string& id, int mode, double value, double tol, std::string note = {}) {
  CheckRecord c;
  c.id = id;
  c.mode = mode;
  c.value = value;
  c.tolerance = tol;
  c.status = Status::strict;
  c.verdict = value < tol ? Verdict::pass : Verdict::fail;
  c.note = std::move(note);
  return c;
}

CheckRecord skipped(const std::string& id, int mode, double tol, std::string note) {
  CheckRecord c;
  c.id = id;
  c.mode = mode;
  c.tolerance = tol;
  c.note = std::move(note);
  return c;
}

DiscreteOperator assemble(const Scenario& sc, const DiscretizationPtr& d) {
  switch (sc.op) {
    case OperatorKind::D: return assemble_intrinsic_dirac(d);
    case OperatorKind::D_H: return assemble_hypersurface_dirac(d);
    case OperatorKind::D_f: return assemble_dirac_schrodinger(d, sc.f);
  }
  return assemble_intrinsic_dirac(d);
}

// JSON numbers cannot be NaN or infinite; those become null.
json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::string cell(const json& v) {
  if (v.is_null()) return "";
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v.get<double>());
  return buf;
}

}  // namespace

RunReport run_scenario(const Scenario& sc) {
  const auto t0 = std::chrono::steady_clock::now();
  RunReport r;
  r.scenario = sc;
  const HypersurfaceModel model = make_model(sc.model, sc.params);
  r.model_label = model.describe();
  const DiscretizationPtr d = discretize(model, sc.resolution, sc.basis);

  for (const auto& id : sc.checks) {
    if (std::find(identity_check_ids().begin(), identity_check_ids().end(), id) != identity_check_ids().end()) continue;
    const TheoremId t = theorem_from_string(id);
    if (theorem_operator(t) != sc.op)
      throw ConfigError(std::string("checks: ") + id + " is stated for " + to_string(theorem_operator(t)) +
                        ", but operator.kind is " + to_string(sc.op));
  }

  const DiscreteOperator op = assemble(sc, d);
  const SpectrumResult spec = eigensolve(op, sc.count);
  std::vector<int> selected = sc.indices;
  if (selected.empty())
    for (int i = 0; i < sc.count; ++i) selected.push_back(i);
  for (int i = 0; i < sc.count; ++i) {
    const double lam = spec.values(i);
    const double res = spec.residuals(i);
    r.spectrum.push_back({i, lam, res, res < kCertifiedResidual * std::max(1.0, std::abs(lam))});
  }

  std::mt19937_64 rng(sc.seed);
  for (const auto& id : sc.checks) {
    const bool identity =
        std::find(identity_check_ids().begin(), identity_check_ids().end(), id) != identity_check_ids().end();
    if (!identity) {
      const TheoremId t = theorem_from_string(id);
      for (int i : selected) {
        const SpinorField& phi = spec.vectors[static_cast<std::size_t>(i)];
        const double lam = spec.values(i);
        BoundRecord b;
        b.mode = i;
        b.certified = r.spectrum[static_cast<std::size_t>(i)].certified;
        if (theorem_is_conformal(t)) {
          if (sc.optimize) {
            OptimizeOptions oo;
            oo.budget = sc.budget;
            oo.band = sc.band;
            OptimizeResult opt = optimize_u(t, op, lam, phi, oo);
            b.u = opt.best;
            r.optimizer.push_back({i, t, std::move(opt)});
          } else {
            b.u = sc.u.value_or(ScalarSpec{});
          }
          b.report = evaluate_bound(t, op, lam, phi, BoundExtras{b.u});
        } else {
          b.report = evaluate_bound(t, op, lam, phi);
        }
        if (b.certified && !b.report.sound()) ++r.soundness_violations;
        r.bounds.push_back(std::move(b));
      }
      continue;
    }

    const double tol = tolerance_for(sc, id);
    if (id == "lichnerowicz") {
      r.checks.push_back(residual_check(id, -1, lichnerowicz_residual(*d), tol));
    } else if (id == "witten") {
      if (!d->has_ambient())
        r.checks.push_back(skipped(id, -1, tol, "no ambient Clifford data for this model"));
      else
        r.checks.push_back(residual_check(id, -1, witten_identity_residual(*d), tol));
    } else if (id == "hermiticity") {
      r.checks.push_back(residual_check(id, -1, hermiticity_defect(op), tol));
    } else if (id == "conformal_covariance") {
      if (!d->collocation)
        r.checks.push_back(skipped(id, -1, tol, "needs a collocation grid"));
      else
        r.checks.push_back(residual_check(id, -1, conformal_covariance_residual(d, sc.u.value_or(ScalarSpec{})), tol));
    } else {
      for (int i : selected) {
        const SpinorField& phi = spec.vectors[static_cast<std::size_t>(i)];
        const double lam = spec.values(i);
        const EMTensorField q = compute_Q(phi);
        if (id == "trace_identity") {
          r.checks.push_back(residual_check(id, i, trace_identity_residual(phi, q), tol));
        } else if (id == "em_spinor") {
          const EMSpinorCheck em = em_spinor_residual(phi, q);
          CheckRecord c = skipped(id, i, tol, em.t_killing ? "T-Killing" : "");
          c.value = em.residual;
          c.status = em.residual < tol ? Status::strict : Status::violated;
          r.checks.push_back(c);
        } else if (id == "qtr") {
          const QtrCheck qt = qtr_identity_residual(phi, q);
          if (qt.status == Status::not_applicable)
            r.checks.push_back(skipped(id, i, tol, "not an EM-spinor"));
          else
            r.checks.push_back(residual_check(id, i, qt.residual, tol));
        } else if (id == "qformula") {
          std::uniform_real_distribution<double> uni(-1.0, 1.0);
          RVector p(d->nodes), qq(d->nodes);
          for (int k = 0; k < d->nodes; ++k) p(k) = uni(rng);
          for (int k = 0; k < d->nodes; ++k) qq(k) = uni(rng);
          const ConnectionParams params = make_params(p, qq, lam, op.background);
          r.checks.push_back(residual_check(id, i, qformula_residual(phi, params, q), tol, "random p, q"));
        } else if (id == "integral_identity") {
          const ConnectionParams params = pq_thm1(*d, q, lam, op.background);
          if (params.status != Status::strict)
            r.checks.push_back(skipped(id, i, tol, std::string("hypothesis ") + to_string(params.status)));
          else
            r.checks.push_back(residual_check(id, i, integral_identity_residual(phi, params, q), tol));
        } else if (id == "wem") {
          if (d->n < 2) {
            r.checks.push_back(skipped(id, i, tol, "n = 1"));
          } else {
            const WEMCheck w = wem_equality_check(phi, log_density_factor(phi));
            CheckRecord c = skipped(id, i, tol, "u = ln|phi|^2/(n-1)");
            c.value = std::max(w.du_residual, w.wem_residual);
            c.status = c.value < tol ? Status::strict : Status::violated;
            r.checks.push_back(c);
          }
        }
      }
    }
  }
  for (const auto& c : r.checks)
    if (c.verdict == Verdict::fail) ++r.check_failures;
  r.verdict = r.soundness_violations > 0 ? Verdict::fail : Verdict::pass;
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

json report_to_json(const RunReport& r) {
  json j;
  j["artifact_version"] = kArtifactVersion;
  j["scenario"] = r.scenario.source;
  j["model"] = r.model_label;
  json spectrum = json::array();
  for (const auto& m : r.spectrum)
    spectrum.push_back({{"index", m.index}, {"lambda", num(m.lambda)}, {"residual", num(m.residual)},
                        {"certified", m.certified}});
  j["spectrum"] = spectrum;
  json checks = json::array();
  for (const auto& c : r.checks)
    checks.push_back({{"id", c.id},
                      {"mode", c.mode},
                      {"value", num(c.value)},
                      {"tolerance", c.tolerance},
                      {"status", to_string(c.status)},
                      {"verdict", to_string(c.verdict)},
                      {"note", c.note}});
  j["checks"] = checks;
  json bounds = json::array();
  for (const auto& b : r.bounds) {
    const BoundReport& br = b.report;
    json e = {{"model", r.model_label},
              {"mode", b.mode},
              {"theorem", to_string(br.theorem)},
              {"lambda", num(br.lambda)},
              {"lambda_sq", num(br.lambda_sq)},
              {"rhs", num(br.rhs)},
              {"margin", num(br.margin)},
              {"status", to_string(br.status)},
              {"equality", br.equality},
              {"residual", br.residual ? num(*br.residual) : json(nullptr)},
              {"residual_kind", br.residual_kind},
              {"em_residual", num(br.em_residual)},
              {"sign", to_string(br.sign)},
              {"background_min", num(br.background_min)},
              {"background_max", num(br.background_max)},
              {"background_constant", br.background_constant},
              {"mask_fraction", num(br.mask_fraction)},
              {"equality_consistency", to_string(br.equality_consistency())},
              {"certified", b.certified},
              {"sound", br.sound()}};
    if (b.u) e["u"] = scalar_to_json(*b.u);
    bounds.push_back(e);
  }
  j["bounds"] = bounds;
  json opt = json::array();
  for (const auto& o : r.optimizer)
    opt.push_back({{"mode", o.mode},
                   {"theorem", to_string(o.theorem)},
                   {"rhs_initial", num(o.result.rhs_initial)},
                   {"rhs_best", num(o.result.rhs_best)},
                   {"status_best", to_string(o.result.status_best)},
                   {"evaluations", o.result.evaluations},
                   {"budget_exhausted", o.result.budget_exhausted},
                   {"u", scalar_to_json(o.result.best)},
                   {"log", o.result.log}});
  j["optimizer"] = opt;
  j["timing"] = {{"seconds", r.seconds}};
  j["soundness_violations"] = r.soundness_violations;
  j["check_failures"] = r.check_failures;
  j["verdict"] = to_string(r.verdict);
  return j;
}

TableFormat table_format_from_string(const std::string& s) {
  if (s == "csv") return TableFormat::csv;
  if (s == "md") return TableFormat::md;
  throw ConfigError("table: unknown format '" + s + "' (expected csv or md)");
}

const std::vector<std::string>& table_columns() {
  static const std::vector<std::string> cols = {"model",  "mode",     "theorem",  "lambda",        "lambda_sq",
                                                "rhs",    "margin",   "status",   "equality",      "residual",
                                                "residual_kind", "em_residual", "sign", "mask_fraction", "certified"};
  return cols;
}

std::string emit_table(const json& report, TableFormat format) {
  const auto& cols = table_columns();
  std::ostringstream out;
  auto quote = [](const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
  };
  if (format == TableFormat::csv) {
    for (std::size_t c = 0; c < cols.size(); ++c) out << (c ? "," : "") << cols[c];
    out << "\n";
  } else {
    out << "|";
    for (const auto& c : cols) out << " " << c << " |";
    out << "\n|";
    for (std::size_t c = 0; c < cols.size(); ++c) out << "---|";
    out << "\n";
  }
  if (!report.contains("bounds")) return out.str();
  for (const auto& row : report.at("bounds")) {
    if (format == TableFormat::md) out << "|";
    for (std::size_t c = 0; c < cols.size(); ++c) {
      const std::string v = row.contains(cols[c]) ? cell(row.at(cols[c])) : "";
      if (format == TableFormat::csv)
        out << (c ? "," : "") << quote(v);
      else
        out << " " << v << " |";
    }
    out << "\n";
  }
  return out.str();
}

std::string summarize(const RunReport& r) {
  int eq = 0, boundary = 0, violated = 0;
  for (const auto& b : r.bounds) {
    eq += b.report.equality && (b.report.status == Status::strict || b.report.status == Status::boundary);
    boundary += b.report.status == Status::boundary;
    violated += b.report.status == Status::violated;
  }
  std::ostringstream s;
  s << r.scenario.name << ": " << r.model_label << ", " << r.spectrum.size() << " modes, " << r.bounds.size()
    << " bound evaluations (" << eq << " equality, " << boundary << " boundary, " << violated
    << " hypothesis violated), " << r.checks.size() << " checks (" << r.check_failures << " failed), "
    << r.soundness_violations << " soundness violations; verdict " << to_string(r.verdict);
  return s.str();
}

}  // namespace spinbound
