#pragma once

#include <string>
#include <vector>

#include "spinbound/dirac.hpp"

namespace spinbound {

/// One line of a verification table: pass when `value` meets `threshold` in the row's direction.
struct VerifyRow {
  std::string suite;
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool at_least = false;  // value >= threshold instead of value < threshold
  bool pass = false;
};

struct VerifyOptions {
  /// Mutation fixture: assemble D_H with the wrong sign of the mean-curvature term.
  AssemblyOptions assembly;
};

const std::vector<std::string>& verify_suite_names();

/// Run one suite ("all" runs every suite). Throws ConfigError for an unknown name.
std::vector<VerifyRow> run_verify_suite(const std::string& name, const VerifyOptions& opts = {});

std::string format_verify_table(const std::vector<VerifyRow>& rows);

}  // namespace spinbound
