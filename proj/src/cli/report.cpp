#include <schwarzlab/cli/report.hpp>

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace schwarzlab::cli {

using nlohmann::json;

namespace {

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> read_optional(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<double>();
}

}  // namespace

std::string to_json(const RunReport& r, int indent) {
  json j;
  j["command"] = r.command;
  j["config"] = r.config;
  j["status"] = r.status;
  j["exit_code"] = r.exit_code;
  j["message"] = r.message;
  json checks = json::array();
  for (const auto& c : r.checks)
    checks.push_back({{"name", c.name}, {"status", c.status}, {"value", c.value}, {"tolerance", c.tolerance},
                      {"detail", c.detail}});
  j["checks"] = checks;
  j["trace_dimension"] = r.trace_dimension;
  j["redundancy"] = r.redundancy;
  j["simplified_form"] = r.simplified_form;
  j["gamma"] = optional_number(r.gamma);
  j["rho_thm"] = optional_number(r.rho_thm);
  j["rho_gmres"] = optional_number(r.rho_gmres);
  j["rho_obs"] = r.rho_obs;
  j["iterations"] = r.iterations;
  j["converged"] = r.converged;
  j["diverged"] = r.diverged;
  j["final_residual"] = r.final_residual;
  j["final_primal_error"] = r.final_primal_error;
  j["max_energy_defect"] = r.max_energy_defect;
  j["seed"] = r.seed;
  j["timings"] = {{"setup_seconds", r.setup_seconds}, {"solve_seconds", r.solve_seconds}};
  return j.dump(indent);
}

RunReport report_from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("report is not valid JSON: ") + e.what());
  }
  try {
    RunReport r;
    r.command = j.at("command").get<std::string>();
    r.config = j.at("config").get<ConfigMap>();
    r.status = j.at("status").get<std::string>();
    r.exit_code = j.at("exit_code").get<int>();
    r.message = j.at("message").get<std::string>();
    for (const auto& c : j.at("checks"))
      r.checks.push_back({c.at("name").get<std::string>(), c.at("status").get<std::string>(),
                          c.at("value").get<double>(), c.at("tolerance").get<double>(),
                          c.at("detail").get<std::string>()});
    r.trace_dimension = j.at("trace_dimension").get<Index>();
    r.redundancy = j.at("redundancy").get<long>();
    r.simplified_form = j.at("simplified_form").get<bool>();
    r.gamma = read_optional(j, "gamma");
    r.rho_thm = read_optional(j, "rho_thm");
    r.rho_gmres = read_optional(j, "rho_gmres");
    r.rho_obs = j.at("rho_obs").get<double>();
    r.iterations = j.at("iterations").get<Index>();
    r.converged = j.at("converged").get<bool>();
    r.diverged = j.at("diverged").get<bool>();
    r.final_residual = j.at("final_residual").get<double>();
    r.final_primal_error = j.at("final_primal_error").get<double>();
    r.max_energy_defect = j.at("max_energy_defect").get<double>();
    r.seed = j.at("seed").get<unsigned long long>();
    r.setup_seconds = j.at("timings").at("setup_seconds").get<double>();
    r.solve_seconds = j.at("timings").at("solve_seconds").get<double>();
    return r;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed report: ") + e.what());
  }
}

void write_report(const std::string& path, const RunReport& r) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  out << to_json(r) << "\n";
}

RunReport read_report(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open report '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return report_from_json(ss.str());
}

}  // namespace schwarzlab::cli
