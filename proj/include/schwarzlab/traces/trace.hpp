#pragma once

#include <schwarzlab/facets/facets.hpp>

#include <map>
#include <tuple>

namespace schwarzlab::traces {

struct TraceEntry {
  int subdomain;
  long facet;  // -1 for the identity trace
  Index dof;   // global
  Index local;
};

// Compound trace T = diag(T_i). Lambda is ordered subdomain by subdomain,
// facets in per-subdomain order, ascending global dof within a facet.
class TraceOperator {
 public:
  int num_subdomains() const { return static_cast<int>(T_.size()); }
  Index dimension() const { return lambda_offsets_.back(); }
  Index u_dimension() const { return u_offsets_.back(); }
  const SparseMatrix& T(int i) const { return T_[i]; }
  const std::vector<Index>& lambda_offsets() const { return lambda_offsets_; }
  const std::vector<Index>& u_offsets() const { return u_offsets_; }
  Index local_dimension(int i) const { return lambda_offsets_[i + 1] - lambda_offsets_[i]; }
  const std::vector<TraceEntry>& entries() const { return entries_; }
  bool is_identity() const { return identity_; }

  // U -> Lambda and Lambda -> U (transpose)
  Vector apply(std::span<const Scalar> u) const;
  Vector apply_transpose(std::span<const Scalar> lambda) const;
  Vector apply_local(int i, std::span<const Scalar> ui) const;
  Vector apply_transpose_local(int i, std::span<const Scalar> li) const;
  SparseMatrix compound() const;

  long index(int subdomain, Index facet, Index dof) const;
  facets::TraceIndexer indexer() const;
  // true when T T^T = I (each local dof traced at most once)
  bool has_right_inverse() const;

  friend TraceOperator build_trace(const facets::FacetSystem& system, const decomp::Restriction& r);
  friend TraceOperator identity_trace(const decomp::Restriction& r);

 private:
  std::vector<SparseMatrix> T_;
  std::vector<Index> lambda_offsets_{0};
  std::vector<Index> u_offsets_{0};
  std::vector<TraceEntry> entries_;
  std::map<std::tuple<int, Index, Index>, Index> lookup_;
  bool identity_ = false;
};

TraceOperator build_trace(const facets::FacetSystem& system, const decomp::Restriction& r);
// T_i = I on every local space (exceptional configuration).
TraceOperator identity_trace(const decomp::Restriction& r);

// Helpers on stacked vectors.
inline std::span<const Scalar> block(std::span<const Scalar> v, const std::vector<Index>& off, int i) {
  return v.subspan(off[i], off[i + 1] - off[i]);
}
inline std::span<Scalar> block(std::span<Scalar> v, const std::vector<Index>& off, int i) {
  return v.subspan(off[i], off[i + 1] - off[i]);
}

// R_Lambda: one column per interface dof (ascending), row t has a 1 in the
// column of the global dof traced by t.
SparseMatrix glob_incidence(const TraceOperator& trace, const decomp::Multiplicities& mult);

}  // namespace schwarzlab::traces
