#pragma once

#include <schwarzlab/linalg/inner_product.hpp>
#include <schwarzlab/traces/trace.hpp>

#include <array>
#include <memory>

namespace schwarzlab::traces {

enum class ImpedanceVariant { scalar, facet_lumped_mass, glob_block, diagonal, interface_mass, local_operator };

std::string_view to_string(ImpedanceVariant v);
ImpedanceVariant parse_impedance_variant(std::string_view s);

inline constexpr Index kNoDof = static_cast<Index>(-1);

// Global dofs of the endpoints; kNoDof for an eliminated Dirichlet node.
struct InterfaceEdge {
  Index a;
  Index b;
  double length;
};

// Mesh data some impedance variants need: per subdomain the interface edges
// of its boundary, and coordinates per global dof.
struct InterfaceGeometry {
  std::vector<std::vector<InterfaceEdge>> edges;
  std::vector<std::array<double, 2>> dof_coords;
};

InterfaceGeometry interface_geometry(const meshfem::StructuredMesh& mesh, const decomp::Partition& partition,
                                     const meshfem::GlobalProblem& problem);

struct ImpedanceParams {
  ImpedanceVariant variant = ImpedanceVariant::scalar;
  double sigma = 1.0;
  // Per-subdomain factor c_i multiplying M_i; empty means all ones.
  std::vector<double> side_scale;
};

class ImpedanceOperator {
 public:
  ImpedanceVariant variant() const { return variant_; }
  double sigma() const { return sigma_; }
  const SparseMatrix& M(int i) const { return M_[i]; }
  const std::vector<SparseMatrix>& blocks() const { return M_; }
  const SparseMatrix& compound() const { return compound_; }
  const std::vector<Index>& offsets() const { return offsets_; }
  Index dimension() const { return offsets_.back(); }

  bool symmetric() const { return symmetric_; }
  // M block-diagonal with respect to the facets/globs of each subdomain
  bool facet_block_diagonal() const { return facet_block_diagonal_; }
  // both sides of every facet/glob carry identical blocks
  bool side_equal() const { return side_equal_; }

  Vector apply(std::span<const Scalar> lambda) const;
  Vector apply_local(int i, std::span<const Scalar> li) const;
  Vector apply_inverse(std::span<const Scalar> lambda) const;
  Vector apply_inverse_local(int i, std::span<const Scalar> li) const;

  WeightedInnerProduct inner_product(WeightedInnerProduct::Mode mode) const;
  // ||x||^2 in the M^{-1} metric
  double inverse_norm_squared(std::span<const Scalar> x) const;

  friend ImpedanceOperator make_impedance(std::vector<SparseMatrix> blocks, ImpedanceVariant variant, double sigma,
                                          const TraceOperator& trace, const facets::FacetSystem* system);

 private:
  ImpedanceVariant variant_ = ImpedanceVariant::scalar;
  double sigma_ = 1.0;
  std::vector<SparseMatrix> M_;
  SparseMatrix compound_;
  std::vector<Index> offsets_{0};
  std::vector<std::shared_ptr<const DenseFactorization>> factors_;
  bool symmetric_ = true;
  bool facet_block_diagonal_ = true;
  bool side_equal_ = true;
};

// Validates (real, symmetric, positive definite) and derives the flags.
// `system` may be null for the identity trace.
ImpedanceOperator make_impedance(std::vector<SparseMatrix> blocks, ImpedanceVariant variant, double sigma,
                                 const TraceOperator& trace, const facets::FacetSystem* system);

// geometry may be null for variants that do not need it (scalar).
ImpedanceOperator build_impedance(const TraceOperator& trace, const facets::FacetSystem& system,
                                  const ImpedanceParams& params, const InterfaceGeometry* geometry);

// M_i = A_i (exceptional configuration with the identity trace).
ImpedanceOperator impedance_from_local(const TraceOperator& trace, const decomp::LocalOperators& local);

}  // namespace schwarzlab::traces
