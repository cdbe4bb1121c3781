#pragma once

#include <schwarzlab/cli/config.hpp>

#include <optional>
#include <string>
#include <vector>

namespace schwarzlab::cli {

struct CheckResult {
  std::string name;
  std::string status;  // "pass", "fail" or "skipped"
  double value = 0.0;
  double tolerance = 0.0;
  std::string detail;

  bool failed() const { return status == "fail"; }
};

struct RunReport {
  std::string command;  // run or verify
  ConfigMap config;     // effective settings
  std::string status;   // ok, validation_error, diverged, not_converged, assumption_failed
  int exit_code = 0;
  std::string message;

  std::vector<CheckResult> checks;
  Index trace_dimension = 0;
  long redundancy = 0;  // sum over interface dofs of |E_k| + 1 - |N_k|
  bool simplified_form = true;

  std::optional<double> gamma;
  std::optional<double> rho_thm;
  std::optional<double> rho_gmres;
  double rho_obs = -1.0;
  Index iterations = 0;
  bool converged = false;
  bool diverged = false;
  double final_residual = -1.0;
  double final_primal_error = -1.0;
  double max_energy_defect = -1.0;
  unsigned long long seed = 0;

  double setup_seconds = 0.0;
  double solve_seconds = 0.0;
};

std::string to_json(const RunReport& r, int indent = 2);
RunReport report_from_json(std::string_view text);

void write_report(const std::string& path, const RunReport& r);
RunReport read_report(const std::string& path);

}  // namespace schwarzlab::cli
