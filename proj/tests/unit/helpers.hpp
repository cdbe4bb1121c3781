#pragma once

#include <schwarzlab/formulations/instance.hpp>

#include <doctest.h>

#include <random>

namespace testing {

using namespace schwarzlab;

inline Vector random_complex(Index n, unsigned seed) { return traces::random_vector(n, seed); }

inline double rel_diff(std::span<const Scalar> a, std::span<const Scalar> b) {
  const double s = std::max(norm2(b), 1e-300);
  return norm2(sub(a, b)) / s;
}

inline formulations::InstanceSpec grid_spec(meshfem::ProblemKind kind, Index n, Index p, facets::FacetVariant fv,
                                            traces::ExchangeVariant xv) {
  formulations::InstanceSpec s;
  s.problem.kind = kind;
  if (kind == meshfem::ProblemKind::helmholtz) s.problem.kappa = 6.283185307179586;
  if (kind == meshfem::ProblemKind::reaction_diffusion) s.problem.kappa = 1.0;
  s.nx = n;
  s.ny = n;
  s.px = p;
  s.py = p;
  s.facets = fv;
  s.exchange.variant = xv;
  return s;
}

inline formulations::Instance laplace(Index n, Index p, facets::FacetVariant fv, traces::ExchangeVariant xv) {
  return formulations::build_instance(grid_spec(meshfem::ProblemKind::laplace, n, p, fv, xv));
}

}  // namespace testing
