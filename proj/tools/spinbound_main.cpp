#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include <CLI11.hpp>

#include "spinbound/report.hpp"
#include "spinbound/runtime.hpp"
#include "spinbound/verify.hpp"

namespace fs = std::filesystem;
using namespace spinbound;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitSoundness = 1;
constexpr int kExitConfig = 2;

unsigned thread_cap() {
  unsigned cap = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("SPINBOUND_THREADS")) {
    try {
      const int v = std::stoi(env);
      if (v >= 1) cap = static_cast<unsigned>(v);
    } catch (const std::exception&) {
      std::cerr << "ignoring SPINBOUND_THREADS='" << env << "'\n";
    }
  }
  return cap;
}

std::string report_path(const Scenario& sc, const std::string& config) {
  if (!sc.output.empty()) return sc.output;
  return fs::path(config).stem().string() + ".report.json";
}

struct Job {
  std::string config;
  Scenario scenario;
  std::string summary;
  std::string error;
  int code = kExitPass;
};

int cmd_run(const std::vector<std::string>& configs) {
  std::vector<Job> jobs;
  for (const auto& c : configs) {
    try {
      jobs.push_back({c, load_scenario(c), {}, {}, kExitPass});
    } catch (const ConfigError& e) {
      std::cerr << c << ": " << e.what() << "\n";
      return kExitConfig;
    }
  }
  // Each job owns its scenario and output file; nothing mutable is shared.
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      Job& job = jobs[i];
      try {
        const RunReport r = run_scenario(job.scenario);
        const std::string path = report_path(job.scenario, job.config);
        std::ofstream out(path);
        if (!out) throw ConfigError("output: cannot write '" + path + "'");
        out << report_to_json(r).dump(2) << "\n";
        job.summary = summarize(r) + " -> " + path;
        job.code = r.verdict == Verdict::fail ? kExitSoundness : kExitPass;
      } catch (const ConfigError& e) {
        job.error = e.what();
        job.code = kExitConfig;
      } catch (const std::exception& e) {
        job.error = std::string("numerical failure: ") + e.what();
        job.code = kExitSoundness;
      }
    }
  };
  const unsigned n = std::min<unsigned>(thread_cap(), static_cast<unsigned>(jobs.size()));
  std::vector<std::thread> pool;
  for (unsigned k = 1; k < n; ++k) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  int code = kExitPass;
  for (const auto& job : jobs) {
    if (job.error.empty())
      std::cout << job.summary << "\n";
    else
      std::cerr << job.config << ": " << job.error << "\n";
    code = std::max(code, job.code);
  }
  return code;
}

int cmd_verify(const std::string& suite, bool inject) {
  VerifyOptions opts;
  opts.assembly.flip_mean_curvature_sign = inject;
  const auto rows = run_verify_suite(suite, opts);
  std::cout << format_verify_table(rows);
  return std::all_of(rows.begin(), rows.end(), [](const VerifyRow& r) { return r.pass; }) ? kExitPass
                                                                                           : kExitSoundness;
}

int cmd_table(const std::string& report, const std::string& format, const std::string& output) {
  const TableFormat f = table_format_from_string(format);
  std::ifstream in(report);
  if (!in) throw ConfigError("table: cannot open report '" + report + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("table: report '" + report + "' is not valid JSON: " + e.what());
  }
  const std::string text = emit_table(j, f);
  if (output.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(output);
    if (!out) throw ConfigError("table: cannot write '" + output + "'");
    out << text;
  }
  return kExitPass;
}

}  // namespace

int main(int argc, char** argv) {
  pin_blas_threads();
  CLI::App app{"Numerical workbench for hypersurface Dirac eigenvalue bounds"};
  app.require_subcommand(1);

  std::vector<std::string> configs;
  auto* run = app.add_subcommand("run", "Run scenario configs (concurrently, capped by SPINBOUND_THREADS)");
  run->add_option("config", configs, "Scenario JSON files")->required()->check(CLI::ExistingFile);

  std::string suite;
  bool inject = false;
  auto* verify = app.add_subcommand("verify", "Run a verification suite: algebra, geometry, operators, bounds, conformal, all");
  verify->add_option("suite", suite, "Suite name")->required();
  verify->add_flag("--inject-sign-error", inject, "Assemble D_H with the wrong mean-curvature sign (mutation fixture)");

  std::string report, format = "csv", table_out;
  auto* table = app.add_subcommand("table", "Render the bound table of a report");
  table->add_option("report", report, "Report JSON")->required();
  table->add_option("--format", format, "csv or md");
  table->add_option("-o,--output", table_out, "Write to a file instead of standard output");

  auto* models = app.add_subcommand("list-models", "List model kinds and their parameters");
  auto* checks = app.add_subcommand("list-checks", "List check ids accepted in scenario configs");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*run) return cmd_run(configs);
    if (*verify) return cmd_verify(suite, inject);
    if (*table) return cmd_table(report, format, table_out);
    if (*models) {
      for (const auto& name : model_kind_names()) {
        std::cout << name;
        for (const auto& p : model_param_names(model_kind_from_string(name))) std::cout << " " << p;
        std::cout << "\n";
      }
      return kExitPass;
    }
    if (*checks) {
      for (const auto& id : all_check_ids()) std::cout << id << "\n";
      return kExitPass;
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitSoundness;
  }
  return kExitConfig;
}
