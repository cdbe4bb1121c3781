#pragma once

#include <schwarzlab/linalg/sparse.hpp>
#include <schwarzlab/meshfem/mesh.hpp>

#include <optional>

namespace schwarzlab::meshfem {

enum class ProblemKind { laplace, reaction_diffusion, helmholtz };

std::string_view to_string(ProblemKind k);
ProblemKind parse_problem_kind(std::string_view s);

struct SourceSpec {
  enum class Kind { constant, point };
  Kind kind = Kind::constant;
  double value = 1.0;
  double x = 0.5;
  double y = 0.5;
};

struct ProblemParams {
  ProblemKind kind = ProblemKind::helmholtz;
  double kappa = 0.0;
  double eta = 1.0;
  // Volumetric absorption: adds loss * (consistent mass) to A1.
  double loss = 0.0;
  SourceSpec source;
};

// Element contributions are rounded to integer multiples of a power-of-two
// quantum (2^-46 relative to the largest element entry). All partial sums are
// then exact, so any accumulation order gives bitwise identical matrices.
struct AssemblyScales {
  double matrix_quantum = 0.0;
  double load_quantum = 0.0;
};

struct OperatorParts {
  SparseMatrix A0;  // stiffness
  SparseMatrix A1;  // lumped Robin mass * eta (+ loss * mass)
  SparseMatrix A2;  // consistent mass * kappa^2
  Vector f;
};

struct GlobalProblem {
  SparseMatrix A0, A1, A2;
  Vector f;
  bool wave = false;
  Scalar alpha = 1.0;
  // retained dof -> mesh node; empty for synthetic problems
  std::vector<Index> dof_node;
  // mesh node -> retained dof, -1 for eliminated Dirichlet nodes
  std::vector<long> node_dof;
  // point source dof, if any
  std::optional<Index> point_dof;
  AssemblyScales scales;
  ProblemParams params;

  Index size() const { return A0.rows(); }
  // coefficients of A1 and A2 in A-hat
  Scalar c1() const { return wave ? kI : Scalar(1.0); }
  Scalar c2() const { return wave ? Scalar(-1.0) : Scalar(1.0); }
  SparseMatrix combined() const;
};

SparseMatrix combine(const SparseMatrix& a0, const SparseMatrix& a1, const SparseMatrix& a2, bool wave);

// Default boundary for a problem class: all-Robin for helmholtz, all-Dirichlet
// otherwise.
BoundarySpec default_boundary(ProblemKind k);

AssemblyScales assembly_scales(const StructuredMesh& mesh, const ProblemParams& params);

// Assembles the listed elements into the dof numbering `node_dof` (-1 skips
// a node). The point source is not included.
OperatorParts assemble_elements(const StructuredMesh& mesh, const ProblemParams& params,
                                std::span<const Index> elements, std::span<const long> node_dof, Index ndofs,
                                const AssemblyScales& scales);

GlobalProblem assemble(const StructuredMesh& mesh, const ProblemParams& params);

// Synthetic problem from given parts (used by fixtures).
GlobalProblem make_problem(SparseMatrix a0, SparseMatrix a1, SparseMatrix a2, Vector f, bool wave);

// Factorizes A-hat; throws ValidationError("ill-posed ...") when singular.
void check_well_posed(const GlobalProblem& p);

// Reference solution A-hat^{-1} f.
Vector direct_solve(const GlobalProblem& p);

}  // namespace schwarzlab::meshfem
