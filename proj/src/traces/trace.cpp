#include <schwarzlab/traces/trace.hpp>

#include <algorithm>
#include <set>

namespace schwarzlab::traces {

TraceOperator build_trace(const facets::FacetSystem& system, const decomp::Restriction& r) {
  if (system.num_subdomains() != r.num_subdomains()) throw DimensionError("build_trace: subdomain count mismatch");
  TraceOperator t;
  for (int i = 0; i < r.num_subdomains(); ++i) {
    std::vector<Triplet> trip;
    Index row = 0;
    for (Index f : system.per_subdomain[i]) {
      for (Index k : system.facets[f].dofs) {
        const long l = r.local_index(i, k);
        if (l < 0) throw ValidationError("build_trace: facet dof is not a dof of an adjacent subdomain");
        trip.push_back({row, static_cast<Index>(l), 1.0});
        t.lookup_[{i, f, k}] = t.entries_.size();
        t.entries_.push_back({i, static_cast<long>(f), k, static_cast<Index>(l)});
        ++row;
      }
    }
    t.T_.push_back(SparseMatrix::from_triplets(row, r.local_size(i), trip));
    t.lambda_offsets_.push_back(t.lambda_offsets_.back() + row);
    t.u_offsets_.push_back(t.u_offsets_.back() + r.local_size(i));
  }
  return t;
}

TraceOperator identity_trace(const decomp::Restriction& r) {
  TraceOperator t;
  t.identity_ = true;
  for (int i = 0; i < r.num_subdomains(); ++i) {
    const Index n = r.local_size(i);
    t.T_.push_back(SparseMatrix::identity(n));
    for (Index l = 0; l < n; ++l) {
      t.lookup_[{i, Index(-1), r.local_to_global[i][l]}] = t.entries_.size();
      t.entries_.push_back({i, -1, r.local_to_global[i][l], l});
    }
    t.lambda_offsets_.push_back(t.lambda_offsets_.back() + n);
    t.u_offsets_.push_back(t.u_offsets_.back() + n);
  }
  return t;
}

Vector TraceOperator::apply_local(int i, std::span<const Scalar> ui) const { return T_[i].apply(ui); }

Vector TraceOperator::apply_transpose_local(int i, std::span<const Scalar> li) const {
  return T_[i].apply_transpose(li);
}

Vector TraceOperator::apply(std::span<const Scalar> u) const {
  if (u.size() != u_dimension()) throw DimensionError("trace apply: vector has the wrong length");
  Vector out(dimension());
  for (int i = 0; i < num_subdomains(); ++i) {
    const Vector li = T_[i].apply(block(u, u_offsets_, i));
    std::copy(li.begin(), li.end(), out.begin() + static_cast<std::ptrdiff_t>(lambda_offsets_[i]));
  }
  return out;
}

Vector TraceOperator::apply_transpose(std::span<const Scalar> lambda) const {
  if (lambda.size() != dimension()) throw DimensionError("trace transpose: vector has the wrong length");
  Vector out(u_dimension());
  for (int i = 0; i < num_subdomains(); ++i) {
    const Vector ui = T_[i].apply_transpose(block(lambda, lambda_offsets_, i));
    std::copy(ui.begin(), ui.end(), out.begin() + static_cast<std::ptrdiff_t>(u_offsets_[i]));
  }
  return out;
}

SparseMatrix TraceOperator::compound() const { return block_diagonal(T_); }

long TraceOperator::index(int subdomain, Index facet, Index dof) const {
  auto it = lookup_.find({subdomain, facet, dof});
  return it == lookup_.end() ? -1 : static_cast<long>(it->second);
}

facets::TraceIndexer TraceOperator::indexer() const {
  return {dimension(), [this](int i, Index f, Index k) { return index(i, f, k); }};
}

bool TraceOperator::has_right_inverse() const {
  std::set<std::pair<int, Index>> seen;
  for (const auto& e : entries_)
    if (!seen.insert({e.subdomain, e.local}).second) return false;
  return true;
}

SparseMatrix glob_incidence(const TraceOperator& trace, const decomp::Multiplicities& mult) {
  std::vector<Triplet> t;
  const auto& ifc = mult.interface_dofs;
  for (Index row = 0; row < trace.entries().size(); ++row) {
    const Index k = trace.entries()[row].dof;
    auto it = std::lower_bound(ifc.begin(), ifc.end(), k);
    if (it == ifc.end() || *it != k) throw ValidationError("glob incidence: traced dof is not an interface dof");
    t.push_back({row, static_cast<Index>(it - ifc.begin()), 1.0});
  }
  return SparseMatrix::from_triplets(trace.dimension(), ifc.size(), t);
}

}  // namespace schwarzlab::traces
