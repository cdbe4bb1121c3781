#include <schwarzlab/formulations/fetih.hpp>

#include <deque>

namespace schwarzlab::formulations {

FetiH fetih_build(const decomp::Decomposition& dec, const facets::FacetSystem& system,
                  const traces::TraceOperator& trace, const traces::ImpedanceOperator& impedance, bool parallel) {
  if (!system.bilateral()) throw ValidationError("FETI-H requires a bilateral facet system");
  if (trace.is_identity()) throw ValidationError("FETI-H requires a facet trace");
  const int n = dec.num_subdomains();
  if (dec.local.wave) {
    for (int i = 0; i < n; ++i)
      if (dec.local.A1[i].max_abs() != 0.0)
        throw ValidationError("FETI-H requires loss-free subdomain operators (A_i1 = 0); the instance has losses");
  }

  FetiH h;
  // subdomain graph: one edge per facet
  std::vector<int> nodes(n);
  for (int i = 0; i < n; ++i) nodes[i] = i;
  std::vector<facets::Edge> edges;
  for (const auto& f : system.facets) edges.push_back({f.adjacency[0], f.adjacency[1]});
  const auto in_tree = facets::spanning_tree(nodes, edges);
  std::vector<std::vector<std::pair<int, Index>>> adj(n);
  for (Index f = 0; f < edges.size(); ++f) {
    if (!in_tree[f]) continue;
    h.tree_facets.push_back(f);
    adj[edges[f].first].push_back({edges[f].second, f});
    adj[edges[f].second].push_back({edges[f].first, f});
  }
  h.sign.assign(n, 0);
  if (n > 0) {
    h.sign[0] = 1;
    std::deque<int> queue{0};
    while (!queue.empty()) {
      const int i = queue.front();
      queue.pop_front();
      for (auto [j, f] : adj[i]) {
        if (h.sign[j] != 0) continue;
        h.sign[j] = -h.sign[i];
        queue.push_back(j);
      }
    }
  }
  for (int i = 0; i < n; ++i)
    if (h.sign[i] == 0 || (n > 1 && adj[i].empty()))
      throw ValidationError("FETI-H: subdomain " + std::to_string(i) +
                            " has no facet with an opposite-sign neighbour (subdomain graph is disconnected)");

  // A_i + i sigma_i sum_{F in tree, i in N_F} T_iF^T M_F T_iF, M_F from the lower-index side
  std::vector<std::vector<Triplet>> aug(n);
  for (Index f : h.tree_facets) {
    const auto& F = system.facets[f];
    const int low = F.adjacency[0];
    const Index base = static_cast<Index>(trace.index(low, f, F.dofs.front())) - trace.lambda_offsets()[low];
    for (int i : F.adjacency) {
      for (Index a = 0; a < F.dofs.size(); ++a) {
        const Index la = trace.entries()[static_cast<Index>(trace.index(i, f, F.dofs[a]))].local;
        for (Index c = 0; c < F.dofs.size(); ++c) {
          const Scalar m = impedance.M(low).at(base + a, base + c);
          if (m == Scalar(0.0)) continue;
          const Index lc = trace.entries()[static_cast<Index>(trace.index(i, f, F.dofs[c]))].local;
          aug[i].push_back({la, lc, m});
        }
      }
    }
  }
  std::vector<SparseMatrix> blocks(n);
  for (int i = 0; i < n; ++i) {
    const Index ni = dec.restriction.local_size(i);
    const SparseMatrix extra = SparseMatrix::from_triplets(ni, ni, aug[i]);
    blocks[i] = add(dec.local.A(i), extra, 1.0, Scalar(0.0, h.sign[i]));
  }
  h.augmented = AugmentedLocal(std::move(blocks), kI, parallel);

  // B = J T: rows (F, k), +1 on the higher-index side, -1 on the lower
  std::vector<Triplet> b;
  h.row_offsets.push_back(0);
  const auto& uoff = trace.u_offsets();
  for (Index f = 0; f < system.facets.size(); ++f) {
    const auto& F = system.facets[f];
    const int lo = F.adjacency[0], hi = F.adjacency[1];
    for (Index a = 0; a < F.dofs.size(); ++a) {
      const Index row = h.row_offsets.back() + a;
      const Index lhi = trace.entries()[static_cast<Index>(trace.index(hi, f, F.dofs[a]))].local;
      const Index llo = trace.entries()[static_cast<Index>(trace.index(lo, f, F.dofs[a]))].local;
      b.push_back({row, uoff[hi] + lhi, 1.0});
      b.push_back({row, uoff[lo] + llo, -1.0});
    }
    h.row_offsets.push_back(h.row_offsets.back() + F.dofs.size());
  }
  h.B = SparseMatrix::from_triplets(h.row_offsets.back(), trace.u_dimension(), b);
  return h;
}

FetiH fetih_build(const Instance& inst, bool parallel) {
  return fetih_build(inst.dec, inst.system, inst.trace, inst.impedance, parallel);
}

FetiHSolution fetih_solve(const FetiH& h, std::span<const Scalar> f, double tol, Index maxit) {
  if (f.size() != h.augmented.dimension()) throw DimensionError("FETI-H: load has the wrong length");
  const Vector af = h.augmented.solve(f);
  const Vector rhs = h.B.apply(af);
  auto op = [&h](const Vector& l) { return h.B.apply(h.augmented.solve(h.B.apply_transpose(l))); };
  FetiHSolution s;
  s.gmres = gmres(op, rhs, WeightedInnerProduct::euclidean(rhs.size()), tol, maxit);
  s.lambda = s.gmres.x;
  const Vector btl = h.B.apply_transpose(s.lambda);
  Vector r(f.begin(), f.end());
  for (Index k = 0; k < r.size(); ++k) r[k] -= btl[k];
  s.u = h.augmented.solve(r);
  return s;
}

}  // namespace schwarzlab::formulations
