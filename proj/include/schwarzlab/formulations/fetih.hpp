#pragma once

#include <schwarzlab/formulations/augmented.hpp>
#include <schwarzlab/formulations/instance.hpp>
#include <schwarzlab/linalg/gmres.hpp>

namespace schwarzlab::formulations {

struct FetiH {
  std::vector<int> sign;            // sigma_i in {+1, -1}
  std::vector<Index> tree_facets;   // F-perp
  AugmentedLocal augmented;         // A_i + i sigma_i sum T^T M_F T
  SparseMatrix B;                   // one-sided signed jump J T
  std::vector<Index> row_offsets;   // first row of every facet in B
};

FetiH fetih_build(const decomp::Decomposition& dec, const facets::FacetSystem& system,
                  const traces::TraceOperator& trace, const traces::ImpedanceOperator& impedance,
                  bool parallel = false);
FetiH fetih_build(const Instance& inst, bool parallel = false);

struct FetiHSolution {
  Vector u;
  Vector lambda;
  GmresResult gmres;
};

// GMRES on B A~^{-1} B^T l = B A~^{-1} f, then u = A~^{-1} (f - B^T l).
FetiHSolution fetih_solve(const FetiH& h, std::span<const Scalar> f, double tol, Index maxit);

}  // namespace schwarzlab::formulations
