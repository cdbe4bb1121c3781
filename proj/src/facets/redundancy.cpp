#include <schwarzlab/facets/facets.hpp>

#include <algorithm>
#include <map>
#include <queue>

namespace schwarzlab::facets {

namespace {

// Nodes on the tree path from `from` to `to`, both included.
std::vector<int> tree_path(const std::vector<Edge>& tree, int from, int to) {
  std::map<int, std::vector<int>> adj;
  for (const auto& [a, b] : tree) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  std::map<int, int> parent{{from, from}};
  std::queue<int> q;
  q.push(from);
  while (!q.empty()) {
    const int x = q.front();
    q.pop();
    if (x == to) break;
    for (int y : adj[x]) {
      if (parent.count(y)) continue;
      parent[y] = x;
      q.push(y);
    }
  }
  if (!parent.count(to)) throw Error("redundancy_basis: spanning tree is not connected");
  std::vector<int> path{to};
  while (path.back() != from) path.push_back(parent[path.back()]);
  std::reverse(path.begin(), path.end());
  return path;
}

}  // namespace

RedundancyBasis redundancy_basis(const FacetSystem& system, const decomp::Multiplicities& mult,
                                 const TraceIndexer& trace) {
  RedundancyBasis basis;
  if (!system.bilateral()) return basis;
  const AdmissibilityReport rep = check_admissibility(system, mult);
  for (const auto& g : rep.graphs) {
    if (!g.connected || g.cycles <= 0) continue;
    const auto in_tree = spanning_tree(g.nodes, g.edges);
    std::vector<Edge> tree;
    for (Index e = 0; e < g.edges.size(); ++e)
      if (in_tree[e]) tree.push_back(g.edges[e]);
    for (Index e = 0; e < g.edges.size(); ++e) {
      if (in_tree[e]) continue;
      // cycle: a -> b along the non-tree edge, then back to a through the tree
      const auto [a, b] = g.edges[e];
      std::vector<int> cycle = tree_path(tree, b, a);
      cycle.insert(cycle.begin(), a);
      Vector z(trace.dimension, Scalar(0.0));
      for (Index s = 0; s + 1 < cycle.size(); ++s) {
        const int from = cycle[s], to = cycle[s + 1];
        const long f = system.find_pair(from, to);
        if (f < 0) throw Error("redundancy_basis: cycle edge without a facet");
        const long tf = trace.index(from, static_cast<Index>(f), g.dof);
        const long tt = trace.index(to, static_cast<Index>(f), g.dof);
        if (tf < 0 || tt < 0) throw Error("redundancy_basis: facet dof missing from the trace space");
        z[static_cast<Index>(tf)] += 1.0;
        z[static_cast<Index>(tt)] -= 1.0;
      }
      basis.vectors.push_back(std::move(z));
      basis.dof_of_vector.push_back(g.dof);
    }
  }
  return basis;
}

}  // namespace schwarzlab::facets
