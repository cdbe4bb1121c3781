#include <schwarzlab/formulations/instance.hpp>

#include <schwarzlab/formulations/exceptional.hpp>

namespace schwarzlab::formulations {

double default_sigma(const meshfem::ProblemParams& p) {
  if (p.kind == meshfem::ProblemKind::helmholtz && p.kappa > 0.0) return p.kappa;
  return 1.0;
}

namespace {

void build_interface(Instance& inst, facets::FacetVariant fv, traces::ImpedanceParams ip,
                     const traces::ExchangeParams& xp, bool allow_inadmissible) {
  const int n = inst.dec.num_subdomains();
  inst.system = facets::build_facets(inst.dec.mult, n, fv);
  inst.admissibility = facets::check_admissibility(inst.system, inst.dec.mult);
  if (!inst.admissibility.admissible && !allow_inadmissible) {
    std::string msg = "facet system is not admissible (connectivity graph must be connected for every interface dof)";
    if (!inst.admissibility.disconnected_dofs.empty())
      msg += "; first disconnected dof " + std::to_string(inst.admissibility.disconnected_dofs.front());
    if (!inst.admissibility.uncovered_dofs.empty())
      msg += "; first uncovered dof " + std::to_string(inst.admissibility.uncovered_dofs.front());
    throw ValidationError(msg);
  }
  inst.alpha = inst.problem.wave ? kI : Scalar(1.0);
  inst.sigma = ip.sigma;
  if (xp.variant == traces::ExchangeVariant::exceptional) {
    if (inst.problem.wave)
      throw ValidationError("exceptional exchange requires the coercive setting (alpha = 1); rejected for wave problems");
    inst.exchange = exceptional_exchange(inst.problem, inst.dec);
    inst.trace = traces::identity_trace(inst.dec.restriction);
    inst.impedance = traces::impedance_from_local(inst.trace, inst.dec.local);
    return;
  }
  inst.trace = traces::build_trace(inst.system, inst.dec.restriction);
  traces::InterfaceGeometry geom;
  const bool needs_geometry =
      ip.variant != traces::ImpedanceVariant::scalar && !inst.mesh.nodes.empty();
  if (needs_geometry) geom = traces::interface_geometry(inst.mesh, inst.partition, inst.problem);
  inst.impedance = traces::build_impedance(inst.trace, inst.system, ip, needs_geometry ? &geom : nullptr);
  inst.exchange = traces::build_exchange(inst.trace, inst.system, inst.impedance, inst.dec.mult, xp);
}

}  // namespace

void finish_instance(Instance& inst, facets::FacetVariant fv, const traces::ExchangeParams& xp, double sigma) {
  traces::ImpedanceParams ip;
  ip.variant = traces::ImpedanceVariant::scalar;
  ip.sigma = sigma;
  build_interface(inst, fv, ip, xp, false);
  inst.u_hat = meshfem::direct_solve(inst.problem);
  inst.reference = inst.dec.restriction.restrict_all(inst.u_hat);
}

Instance build_instance(const InstanceSpec& spec) {
  if (spec.nx < 1 || spec.ny < 1) throw ValidationError("mesh needs nx, ny >= 1");
  if (spec.exchange.variant == traces::ExchangeVariant::swap && spec.facets == facets::FacetVariant::globs)
    throw ValidationError("swap exchange requires a bilateral facet system (every facet shared by exactly two subdomains)");
  if (spec.exchange.variant != traces::ExchangeVariant::swap &&
      spec.exchange.variant != traces::ExchangeVariant::exceptional && spec.facets != facets::FacetVariant::globs)
    throw ValidationError(std::string(traces::to_string(spec.exchange.variant)) +
                          " exchange requires a glob system (reflections are defined on globs)");

  Instance inst;
  const auto boundary = spec.boundary ? *spec.boundary : meshfem::default_boundary(spec.problem.kind);
  inst.mesh = meshfem::build_mesh(spec.nx, spec.ny, boundary);
  inst.problem = meshfem::assemble(inst.mesh, spec.problem);
  inst.partition = decomp::partition_grid(inst.mesh, spec.px, spec.py);
  inst.dec = decomp::build_restrictions(inst.mesh, inst.partition, inst.problem);

  traces::ImpedanceParams ip;
  ip.variant = spec.impedance;
  ip.sigma = spec.sigma ? *spec.sigma : default_sigma(spec.problem);
  if (!(ip.sigma > 0.0)) throw ValidationError("impedance sigma must be positive");
  ip.side_scale = spec.side_scale;
  build_interface(inst, spec.facets, ip, spec.exchange, spec.allow_inadmissible);
  inst.u_hat = meshfem::direct_solve(inst.problem);
  inst.reference = inst.dec.restriction.restrict_all(inst.u_hat);
  return inst;
}

}  // namespace schwarzlab::formulations
