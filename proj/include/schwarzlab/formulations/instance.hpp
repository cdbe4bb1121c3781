#pragma once

#include <schwarzlab/traces/exchange.hpp>

#include <optional>

namespace schwarzlab::formulations {

// Everything needed to set up one discrete method on one problem.
struct InstanceSpec {
  meshfem::ProblemParams problem;
  Index nx = 16;
  Index ny = 16;
  std::optional<meshfem::BoundarySpec> boundary;  // default by problem class
  Index px = 2;
  Index py = 2;
  facets::FacetVariant facets = facets::FacetVariant::globs;
  traces::ImpedanceVariant impedance = traces::ImpedanceVariant::scalar;
  std::optional<double> sigma;  // default: kappa for wave problems, 1 otherwise
  std::vector<double> side_scale;
  traces::ExchangeParams exchange;
  // keep going when a properly closed system turns out inadmissible
  bool allow_inadmissible = false;
};

struct Instance {
  meshfem::StructuredMesh mesh;
  meshfem::GlobalProblem problem;
  decomp::Partition partition;
  decomp::Decomposition dec;
  facets::FacetSystem system;
  facets::AdmissibilityReport admissibility;
  traces::TraceOperator trace;
  traces::ImpedanceOperator impedance;
  traces::ExchangeOperator exchange;
  Scalar alpha = 1.0;
  double sigma = 1.0;
  Vector u_hat;      // A-hat^{-1} f-hat
  Vector reference;  // R u-hat, stacked

  bool wave() const { return problem.wave; }
  int num_subdomains() const { return dec.num_subdomains(); }
};

double default_sigma(const meshfem::ProblemParams& p);

// Validates the combination and builds all operators. Throws
// ValidationError with the violated requirement.
Instance build_instance(const InstanceSpec& spec);

// Completes an instance whose problem and decomposition are set: facets,
// trace, impedance (scalar sigma) and exchange.
void finish_instance(Instance& inst, facets::FacetVariant fv, const traces::ExchangeParams& xp, double sigma);

}  // namespace schwarzlab::formulations
