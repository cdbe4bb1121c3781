// schwarzlab: run, verify or sweep a domain decomposition experiment.
#include <schwarzlab/cli/runner.hpp>

#include <CLI11.hpp>

#include <iostream>

using namespace schwarzlab;

int main(int argc, char** argv) {
  CLI::App app{"Optimized Schwarz / 2-Lagrange-multiplier experiment runner"};
  app.require_subcommand(1);
  bool parallel = false;
  bool quiet = false;
  app.add_flag("--parallel-subdomains", parallel, "Run subdomain solves on parallel threads");
  app.add_flag("-q,--quiet", quiet, "Only print errors");

  std::string run_cfg, verify_cfg, sweep_cfg;
  std::vector<std::string> vary;
  std::vector<std::string> overrides;
  auto* run_cmd = app.add_subcommand("run", "Solve one configuration");
  run_cmd->add_option("config", run_cfg, "Config file")->required();
  auto* verify_cmd = app.add_subcommand("verify", "Run the invariant checks without solving");
  verify_cmd->add_option("config", verify_cfg, "Config file")->required();
  auto* sweep_cmd = app.add_subcommand("sweep", "Cartesian parameter sweep");
  sweep_cmd->add_option("config", sweep_cfg, "Config file")->required();
  sweep_cmd->add_option("--vary", vary, "section.key=v1,v2,...")->required();
  for (auto* sub : {run_cmd, verify_cmd, sweep_cmd})
    sub->add_option("--set", overrides, "Override one setting, section.key=value");

  CLI11_PARSE(app, argc, argv);

  cli::RunOptions opts;
  opts.parallel_subdomains = parallel;
  opts.log = quiet ? nullptr : &std::cout;
  try {
    const std::string& path = run_cmd->parsed() ? run_cfg : verify_cmd->parsed() ? verify_cfg : sweep_cfg;
    cli::ConfigMap config = cli::read_config_file(path);
    for (const auto& o : overrides) {
      const auto eq = o.find('=');
      if (eq == std::string::npos) throw ValidationError("--set expects section.key=value (got '" + o + "')");
      config[o.substr(0, eq)] = o.substr(eq + 1);
    }
    int code = 0;
    if (run_cmd->parsed()) {
      const auto out = cli::run(config, opts);
      code = out.report.exit_code;
      if (code != 0) std::cerr << out.report.message << "\n";
    } else if (verify_cmd->parsed()) {
      const auto out = cli::verify(config, opts);
      code = out.report.exit_code;
      if (code != 0) std::cerr << out.report.message << "\n";
    } else {
      code = cli::sweep(config, vary, opts);
    }
    return code;
  } catch (const ValidationError& e) {
    std::cerr << e.what() << "\n";
    return cli::kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
