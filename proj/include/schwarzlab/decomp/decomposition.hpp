#pragma once

#include <schwarzlab/meshfem/assemble.hpp>

#include <iosfwd>

namespace schwarzlab::decomp {

struct Partition {
  int num_subdomains = 0;
  std::vector<int> owner;                      // per element
  std::vector<std::vector<Index>> elements;    // per subdomain, ascending
};

// px * py rectangular blocks; subdomain index bx + px * by from the
// lower-left corner.
Partition partition_grid(const meshfem::StructuredMesh& mesh, Index px, Index py);
Partition partition_from_owners(std::vector<int> owner);

// One integer per line, one line per element.
void write_partition(std::ostream& os, const Partition& p);
Partition read_partition(std::istream& is);

struct Restriction {
  Index global_size = 0;
  std::vector<std::vector<Index>> local_to_global;  // g_i, strictly ascending
  std::vector<SparseMatrix> R;                      // n_i x n incidence

  int num_subdomains() const { return static_cast<int>(local_to_global.size()); }
  Index local_size(int i) const { return local_to_global[i].size(); }
  // -1 when k is not a dof of subdomain i
  long local_index(int i, Index k) const;
  Vector restrict_to(int i, std::span<const Scalar> global) const;
  // R v-hat stacked over subdomains
  Vector restrict_all(std::span<const Scalar> global) const;
  // sum_i R_i^T u_i for a stacked u
  Vector assemble_all(std::span<const Scalar> stacked) const;
  // offsets of each subdomain block in a stacked vector; size N + 1
  std::vector<Index> offsets() const;
};

struct LocalOperators {
  std::vector<SparseMatrix> A0, A1, A2;
  std::vector<Vector> f;
  std::vector<std::vector<char>> bubble;
  bool wave = false;

  SparseMatrix A(int i) const { return meshfem::combine(A0[i], A1[i], A2[i], wave); }
  Scalar c1() const { return wave ? kI : Scalar(1.0); }
  Scalar c2() const { return wave ? Scalar(-1.0) : Scalar(1.0); }
};

struct Multiplicities {
  std::vector<int> mu;                       // per global dof
  std::vector<std::vector<int>> sharing;     // N_k, ascending
  std::vector<Index> interface_dofs;         // D_Gamma, ascending
  int mu_max = 0;
};

struct Decomposition {
  Restriction restriction;
  LocalOperators local;
  Multiplicities mult;

  int num_subdomains() const { return restriction.num_subdomains(); }
};

Decomposition build_restrictions(const meshfem::StructuredMesh& mesh, const Partition& partition,
                                 const meshfem::GlobalProblem& problem);

// Synthetic decomposition from explicit local-to-global maps and local parts.
Decomposition make_decomposition(Index global_size, std::vector<std::vector<Index>> local_to_global,
                                 std::vector<meshfem::OperatorParts> parts, bool wave);

Multiplicities compute_multiplicities(const Restriction& r);
std::vector<std::vector<char>> bubble_dofs(const Restriction& r, const Multiplicities& m);

struct AssemblingReport {
  double matrix_deviation = 0.0;  // max over A0, A1, A2 and A-hat
  double load_deviation = 0.0;
  Index worst_row = 0;
  Index worst_col = 0;
  Index worst_load = 0;
  bool exact = false;
  bool passed = false;
  std::string message;
};

AssemblingReport check_assembling(const Restriction& r, const LocalOperators& local,
                                  const meshfem::GlobalProblem& problem);

// sum_i R_i^T B_i R_i
SparseMatrix assemble_global(const Restriction& r, std::span<const SparseMatrix> blocks);

}  // namespace schwarzlab::decomp
