// Acceptance battery: one PASS/FAIL line per criterion, nonzero exit on any
// failure.
#include <schwarzlab/cli/runner.hpp>
#include <schwarzlab/formulations/dual.hpp>
#include <schwarzlab/formulations/twin_scalar.hpp>
#include <schwarzlab/linalg/spectral.hpp>
#include <schwarzlab/solvers/gamma.hpp>
#include <schwarzlab/solvers/iteration.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <tuple>

using namespace schwarzlab;
using formulations::Instance;
using formulations::InstanceSpec;
using facets::FacetVariant;
using meshfem::ProblemKind;
using traces::ExchangeVariant;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

constexpr double kTwoPi = 6.283185307179586;

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(3);
  os << v;
  return os.str();
}

InstanceSpec spec(ProblemKind kind, Index n, Index px, Index py, FacetVariant fv, ExchangeVariant xv) {
  InstanceSpec s;
  s.problem.kind = kind;
  if (kind == ProblemKind::helmholtz) s.problem.kappa = kTwoPi;
  if (kind == ProblemKind::reaction_diffusion) s.problem.kappa = 1.0;
  s.nx = n;
  s.ny = n;
  s.px = px;
  s.py = py;
  s.facets = fv;
  s.exchange.variant = xv;
  return s;
}

double rel(std::span<const Scalar> a, std::span<const Scalar> b) {
  return norm2(sub(a, b)) / std::max(norm2(b), 1e-300);
}

// 1. assembling exactness
Outcome assembling() {
  Outcome o;
  double worst_time = 0.0;
  int count = 0;
  for (auto kind : {ProblemKind::laplace, ProblemKind::reaction_diffusion, ProblemKind::helmholtz})
    for (Index n : {4, 8, 16, 32, 64})
      for (auto [px, py] : {std::pair<Index, Index>{1, 1}, {2, 1}, {2, 2}, {4, 2}, {4, 4}}) {
        if (n % px || n % py) continue;
        const auto t0 = Clock::now();
        meshfem::ProblemParams p;
        p.kind = kind;
        p.kappa = kind == ProblemKind::helmholtz ? kTwoPi : 1.0;
        const auto mesh = meshfem::build_mesh(n, n, meshfem::default_boundary(kind));
        const auto prob = meshfem::assemble(mesh, p);
        const auto dec = decomp::build_restrictions(mesh, decomp::partition_grid(mesh, px, py), prob);
        const auto rep = decomp::check_assembling(dec.restriction, dec.local, prob);
        const double t = seconds_since(t0);
        worst_time = std::max(worst_time, t);
        ++count;
        if (!rep.exact || t > 1.0) {
          o.pass = false;
          o.detail += " [" + std::string(meshfem::to_string(kind)) + " n=" + std::to_string(n) + " " +
                      std::to_string(px) + "x" + std::to_string(py) + ": " + rep.message + "]";
        }
      }
  o.detail = std::to_string(count) + " instances up to 65x65 nodes and 4x4 subdomains, deviation 0, slowest " +
             fmt(worst_time) + " s" + o.detail;
  return o;
}

// 2. exchange involution and conformity
Outcome exchange_involution() {
  Outcome o;
  double inv = 0.0, conf = 0.0;
  std::vector<InstanceSpec> cases;
  for (auto kind : {ProblemKind::laplace, ProblemKind::helmholtz})
    for (auto [px, py] : {std::pair<Index, Index>{2, 2}, {3, 3}}) {
      for (auto fv : {FacetVariant::bilateral_max, FacetVariant::properly_closed, FacetVariant::non_redundant})
        cases.push_back(spec(kind, 12, px, py, fv, ExchangeVariant::swap));
      for (auto xv : {ExchangeVariant::multiplicity, ExchangeVariant::weighted, ExchangeVariant::glob_local,
                      ExchangeVariant::global})
        cases.push_back(spec(kind, 12, px, py, FacetVariant::globs, xv));
    }
  cases.push_back(spec(ProblemKind::laplace, 12, 2, 2, FacetVariant::globs, ExchangeVariant::exceptional));
  cases.push_back(spec(ProblemKind::reaction_diffusion, 12, 3, 3, FacetVariant::globs, ExchangeVariant::exceptional));
  for (const auto& s : cases) {
    const Instance inst = formulations::build_instance(s);
    const auto c = traces::check_exchange(inst.exchange, inst.trace, inst.impedance, inst.dec.restriction, 100, 17);
    inv = std::max(inv, c.involution);
    conf = std::max(conf, c.conformity);
    if (c.involution > 1e-12 || c.conformity > 1e-12) {
      o.pass = false;
      o.detail += " [" + std::string(facets::to_string(s.facets)) + "/" +
                  std::string(traces::to_string(s.exchange.variant)) + "]";
    }
  }
  o.detail = std::to_string(cases.size()) +
             " configurations (3 bilateral variants with swap, globs with 4 reflections, exceptional), 100 probes: "
             "max |X^2 v - v| = " +
             fmt(inv) + ", max |(I-X) T R v| = " + fmt(conf) + o.detail;
  return o;
}

// 3. redundancy dimension
Outcome redundancy_dimension() {
  Outcome o;
  const struct {
    FacetVariant fv;
    long per_cross;
  } cases[] = {{FacetVariant::non_redundant, 0}, {FacetVariant::properly_closed, 1}, {FacetVariant::bilateral_max, 3}};
  std::string parts;
  double worst = 0.0;
  for (auto [px, py] : {std::pair<Index, Index>{2, 2}, {3, 3}})
    for (const auto& c : cases) {
      const auto t0 = Clock::now();
      const Instance inst = formulations::build_instance(spec(ProblemKind::laplace, 12, px, py, c.fv,
                                                              ExchangeVariant::swap));
      const Index n = inst.trace.dimension();
      const Index m = inst.trace.u_dimension();
      const DenseMatrix tt = DenseMatrix::from_sparse(inst.trace.compound().transpose());
      const DenseMatrix xt = inst.exchange.dense().transpose();
      DenseMatrix st(m + n, n);
      for (Index r = 0; r < m; ++r)
        for (Index k = 0; k < n; ++k) st(r, k) = tt(r, k);
      for (Index r = 0; r < n; ++r)
        for (Index k = 0; k < n; ++k) st(m + r, k) = xt(r, k) + (r == k ? 1.0 : 0.0);
      const long dim = static_cast<long>(nullspace_dimension(st, 1e-9));
      const long crosses = static_cast<long>((px - 1) * (py - 1));
      const double t = seconds_since(t0);
      worst = std::max(worst, t);
      const bool ok = dim == inst.admissibility.total_cycles && dim == c.per_cross * crosses && n <= 1000 && t <= 10.0;
      o.pass = o.pass && ok;
      parts += " " + std::string(facets::to_string(c.fv)) + "@" + std::to_string(px) + "x" + std::to_string(py) +
               "=" + std::to_string(dim) + "/" + std::to_string(inst.admissibility.total_cycles) +
               (ok ? "" : "(MISMATCH)");
    }
  o.detail = "SVD nullspace / sum of |E_k|+1-|N_k|:" + parts + ", slowest " + fmt(worst) + " s";
  return o;
}

// 4. pseudo-energy identity
Outcome pseudo_energy() {
  Outcome o;
  std::string parts;
  const std::pair<std::string, InstanceSpec> cases[] = {
      {"alpha=1 laplace 2x2", spec(ProblemKind::laplace, 16, 2, 2, FacetVariant::globs, ExchangeVariant::multiplicity)},
      {"alpha=1 reaction 4x4",
       spec(ProblemKind::reaction_diffusion, 16, 4, 4, FacetVariant::properly_closed, ExchangeVariant::swap)},
      {"alpha=i helmholtz 4x4 robin",
       spec(ProblemKind::helmholtz, 32, 4, 4, FacetVariant::globs, ExchangeVariant::multiplicity)}};
  for (const auto& [name, s] : cases) {
    const Instance inst = formulations::build_instance(s);
    const formulations::DualSystem dual(inst);
    double worst = 0.0;
    for (unsigned k = 0; k < 100; ++k) {
      const auto e = dual.pseudo_energy(traces::random_vector(dual.dimension(), 1000 + k));
      worst = std::max(worst, e.defect / e.lambda_norm2);
    }
    o.pass = o.pass && worst <= 1e-10;
    parts += " " + name + ": " + fmt(worst) + ";";
  }
  o.detail = "max |‖Sl‖² + 4p - ‖l‖²| / ‖l‖² over 100 probes:" + parts + " tol 1e-10";
  return o;
}

cli::ConfigMap preset_config(const std::string& preset, ProblemKind kind) {
  cli::ConfigMap m;
  m["method.preset"] = preset;
  m["problem.kind"] = std::string(meshfem::to_string(kind));
  if (kind == ProblemKind::helmholtz) {
    m["problem.kappa"] = "6.283185307179586";
    if (preset == "fetih") m["problem.boundary"] = "dirichlet";
  }
  m["mesh.nx"] = "32";
  m["mesh.ny"] = "32";
  m["partition.px"] = "2";
  m["partition.py"] = "2";
  m["solver.tol"] = "1e-12";
  m["solver.maxit"] = "40000";
  m["solver.diagnostics"] = "false";
  return m;
}

// 5. solution equivalence of the four method presets
Outcome solution_equivalence() {
  Outcome o;
  std::string parts;
  cli::RunOptions opts;
  opts.write_outputs = false;
  for (auto kind : {ProblemKind::laplace, ProblemKind::helmholtz}) {
    std::vector<Vector> us;
    for (const std::string p : {"feti2lm", "loisel", "complete_comm"}) {
      const auto t0 = Clock::now();
      const auto out = cli::run(preset_config(p, kind), opts);
      const double t = seconds_since(t0);
      const bool ok = out.report.exit_code == 0 && out.report.final_primal_error <= 1e-8 && t <= 30.0;
      o.pass = o.pass && ok;
      us.push_back(out.convergence.u);
      parts += " " + std::string(meshfem::to_string(kind)) + "/" + p + " " + fmt(out.report.final_primal_error) +
               " (" + fmt(t) + " s)" + (ok ? "" : " FAILED: " + out.report.message) + ";";
    }
    double pair = 0.0;
    for (std::size_t a = 0; a < us.size(); ++a)
      for (std::size_t b = a + 1; b < us.size(); ++b) pair = std::max(pair, rel(us[a], us[b]));
    o.pass = o.pass && pair <= 1e-8;
    parts += " pairwise " + fmt(pair) + ";";
    // FETI-H on its own loss-free instance (Dirichlet boundary for helmholtz)
    const auto t0 = Clock::now();
    const auto out = cli::run(preset_config("fetih", kind), opts);
    const double t = seconds_since(t0);
    const bool ok = out.report.exit_code == 0 && out.report.final_primal_error <= 1e-8 && t <= 30.0;
    o.pass = o.pass && ok;
    parts += " " + std::string(meshfem::to_string(kind)) + "/fetih" +
             (kind == ProblemKind::helmholtz ? "(dirichlet)" : "") + " " + fmt(out.report.final_primal_error) +
             " (" + fmt(t) + " s)" + (ok ? "" : " FAILED: " + out.report.message) + ";";
  }
  o.detail = "33x33 nodes, 2x2 subdomains, relative error against R A^-1 f:" + parts + " tol 1e-8";
  return o;
}

// 6. rate bound and twin fixture
Outcome rate_bound() {
  Outcome o;
  const Instance inst = formulations::build_instance(
      spec(ProblemKind::laplace, 16, 2, 2, FacetVariant::globs, ExchangeVariant::global));
  const formulations::DualSystem dual(inst);
  const double gamma = solvers::estimate_gamma(dual);
  const auto ref = solvers::make_reference(dual, inst.reference, {}, true);
  solvers::IterationConfig cfg;
  cfg.beta = 0.5;
  cfg.tol = 1e-11;
  cfg.maxit = 20000;
  const auto rep = solvers::richardson(dual, cfg, &ref);
  const double bound = std::sqrt(1.0 - 0.25 * gamma * gamma) + 0.02;
  const bool grid_ok = rep.rho_obs > 0.0 && rep.rho_obs <= bound;

  formulations::TwinScalarParams tp;
  tp.m = 2.0;
  tp.f1 = 0.0;
  tp.f2 = 0.0;
  const Instance twin = formulations::make_twin_scalar(tp);
  const formulations::DualSystem td(twin);
  const double tg = solvers::estimate_gamma(td);
  const auto tref = solvers::make_reference(td, twin.reference, {}, true);
  solvers::IterationConfig tc;
  tc.beta = 1.0;
  tc.tol = 1e-300;
  tc.maxit = 20;
  tc.divergence_window = 0;
  const auto trep = solvers::richardson(td, tc, &tref);
  double quot = 0.0;
  for (Index k = 1; k < trep.history.size(); ++k)
    quot = std::max(quot, std::abs(trep.history[k].error / trep.history[k - 1].error - 1.0 / 3.0));
  const bool twin_ok = std::abs(tg - 2.0 / 3.0) <= 1e-12 && quot <= 1e-12 && std::abs(trep.rho_obs - 1.0 / 3.0) <= 1e-12;
  o.pass = grid_ok && twin_ok;
  o.detail = "laplace 2x2 globs/global beta=0.5: gamma=" + fmt(gamma) + " rho_obs=" + fmt(rep.rho_obs) +
             " <= sqrt(1-0.25 gamma^2)+0.02=" + fmt(bound) + " (" + std::to_string(rep.iterations) +
             " its); twin: gamma-2/3=" + fmt(tg - 2.0 / 3.0) + ", max |quotient-1/3|=" + fmt(quot) + " tol 1e-12";
  return o;
}

// 7. one-step convergence of the exceptional exchange
Outcome one_step() {
  Outcome o;
  double worst = 0.0;
  int count = 0;
  // laplace only on partitions without floating subdomains, where M_i = A_i is positive definite
  const std::vector<std::tuple<ProblemKind, Index, Index>> cases = {
      {ProblemKind::laplace, 2, 1},            {ProblemKind::laplace, 2, 2},
      {ProblemKind::laplace, 4, 2},            {ProblemKind::reaction_diffusion, 2, 1},
      {ProblemKind::reaction_diffusion, 2, 2}, {ProblemKind::reaction_diffusion, 3, 3},
      {ProblemKind::reaction_diffusion, 4, 4}};
  for (const auto& [kind, px, py] : cases)
      for (auto src : {meshfem::SourceSpec::Kind::constant, meshfem::SourceSpec::Kind::point}) {
        auto s = spec(kind, 24, px, py, FacetVariant::globs, ExchangeVariant::exceptional);
        s.problem.source.kind = src;
        s.problem.source.x = 0.3;
        s.problem.source.y = 0.6;
        const Instance inst = formulations::build_instance(s);
        const formulations::DualSystem dual(inst);
        solvers::IterationConfig cfg;
        cfg.beta = 1.0;
        cfg.zero_init = true;
        cfg.maxit = 1;
        cfg.tol = 1e-300;
        cfg.keep_iterates = true;
        const auto rep = solvers::richardson(dual, cfg, nullptr);
        const double e = norm2(sub(rep.iterates.at(1), inst.reference)) / norm2(inst.problem.f);
        worst = std::max(worst, e);
        ++count;
      }
  o.pass = worst <= 1e-10;
  o.detail = std::to_string(count) + " coercive instances, max ‖u1 - R A^-1 f‖/‖f‖ = " + fmt(worst) + " tol 1e-10";
  return o;
}

// 8. energy-decay recursion
Outcome energy_recursion() {
  Outcome o;
  const Instance inst = formulations::build_instance(
      spec(ProblemKind::helmholtz, 16, 4, 4, FacetVariant::globs, ExchangeVariant::multiplicity));
  const formulations::DualSystem dual(inst);
  const auto ref = solvers::make_reference(dual, inst.reference, {}, true);
  solvers::IterationConfig cfg;
  cfg.beta = 0.5;
  cfg.tol = 1e-300;
  cfg.maxit = 200;
  cfg.log_energy = true;
  cfg.divergence_window = 0;
  const auto rep = solvers::richardson(dual, cfg, &ref);
  Index checked = 0;
  for (const auto& h : rep.history) checked += h.energy_defect >= 0.0;
  o.pass = checked == 200 && rep.max_energy_defect <= 1e-9;
  o.detail = "helmholtz 4x4 robin, beta=0.5, " + std::to_string(checked) + " iterations checked, max defect " +
             fmt(rep.max_energy_defect) + " relative to ‖mu_n‖² tol 1e-9";
  return o;
}

// 9. strong absorption with beta = 1
Outcome strong_absorption() {
  Outcome o;
  auto s = spec(ProblemKind::helmholtz, 32, 2, 2, FacetVariant::globs, ExchangeVariant::multiplicity);
  s.problem.loss = 400.0;
  const Instance inst = formulations::build_instance(s);
  const formulations::DualSystem dual(inst);
  const solvers::Reference ref{inst.reference, std::nullopt, {}};
  solvers::IterationConfig cfg;
  cfg.beta = 1.0;
  cfg.tol = 1e-12;
  cfg.maxit = 5000;
  const auto rep = solvers::richardson(dual, cfg, &ref);
  o.pass = rep.final_primal_error <= 1e-8 && rep.iterations <= 5000;
  o.detail = "helmholtz kappa=2pi with volumetric loss 400, beta=1: primal error " + fmt(rep.final_primal_error) +
             " after " + std::to_string(rep.iterations) + " iterations (limit 5000, tol 1e-8)";
  return o;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// 10. determinism of the command-line run
Outcome determinism() {
  Outcome o;
  const fs::path dir = fs::temp_directory_path() / "schwarzlab_acceptance_determinism";
  fs::remove_all(dir);
  fs::create_directories(dir);
  std::vector<std::string> csv;
  for (const std::string preset : {"feti2lm", "complete_comm"}) {
    std::ofstream(dir / (preset + ".cfg")) << "[problem]\nkind = helmholtz\nkappa = 6.283185307179586\n"
                                            << "[mesh]\nnx = 16\nny = 16\n[partition]\npx = 2\npy = 2\n"
                                            << "[method]\npreset = " << preset << "\n"
                                            << "[solver]\nseed = 42\nlog_energy = true\nmaxit = 40000\n";
    for (const std::string run : {"a", "b"}) {
      const fs::path out = dir / (preset + "_" + run);
      const std::string cmd = std::string(SCHWARZLAB_CLI_PATH) + " -q run " + (dir / (preset + ".cfg")).string() +
                              " --set output.dir=" + out.string() + " > /dev/null 2>&1";
      if (std::system(cmd.c_str()) != 0) {
        o.pass = false;
        o.detail += "[run " + preset + "_" + run + " exited nonzero] ";
      }
      csv.push_back(slurp(out / "history.csv"));
    }
  }
  const bool same1 = !csv[0].empty() && csv[0] == csv[1];
  const bool same2 = !csv[2].empty() && csv[2] == csv[3];
  o.pass = o.pass && same1 && same2;
  o.detail = o.detail + "two presets, two runs each with seed 42: history.csv byte-identical " + std::string(same1 ? "yes" : "no") +
             "/" + (same2 ? "yes" : "no") + " (" + std::to_string(csv[0].size()) + " and " +
             std::to_string(csv[2].size()) + " bytes)";
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"assembling exactness", assembling},
      {"exchange involution and conformity", exchange_involution},
      {"redundancy dimension", redundancy_dimension},
      {"pseudo-energy identity", pseudo_energy},
      {"solution equivalence of method presets", solution_equivalence},
      {"rate bound", rate_bound},
      {"one-step convergence", one_step},
      {"energy-decay recursion", energy_recursion},
      {"strong-absorption convergence", strong_absorption},
      {"determinism", determinism}};
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    Outcome o;
    const auto t0 = Clock::now();
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    failed += o.pass ? 0 : 1;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << (k + 1) << " " << criteria[k].first << ": "
              << o.detail << " [" << fmt(seconds_since(t0)) << " s]" << std::endl;
  }
  std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed") << std::endl;
  return failed == 0 ? 0 : 1;
}
