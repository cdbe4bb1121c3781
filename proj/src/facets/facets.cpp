#include <schwarzlab/facets/facets.hpp>

#include <algorithm>
#include <map>
#include <numeric>
#include <ostream>

namespace schwarzlab::facets {

std::string_view to_string(FacetKind k) { return k == FacetKind::glob ? "glob" : "bilateral"; }

std::string_view to_string(FacetVariant v) {
  switch (v) {
    case FacetVariant::bilateral_max:
      return "bilateral_max";
    case FacetVariant::properly_closed:
      return "properly_closed";
    case FacetVariant::non_redundant:
      return "non_redundant";
    case FacetVariant::globs:
      return "globs";
  }
  return "?";
}

FacetVariant parse_facet_variant(std::string_view s) {
  if (s == "bilateral_max") return FacetVariant::bilateral_max;
  if (s == "properly_closed") return FacetVariant::properly_closed;
  if (s == "non_redundant") return FacetVariant::non_redundant;
  if (s == "globs") return FacetVariant::globs;
  throw ValidationError("unknown facet variant '" + std::string(s) +
                        "' (expected bilateral_max, properly_closed, non_redundant or globs)");
}

long FacetSystem::find_pair(int i, int j) const {
  const std::vector<int> key{std::min(i, j), std::max(i, j)};
  for (Index f = 0; f < facets.size(); ++f)
    if (facets[f].adjacency == key) return static_cast<long>(f);
  return -1;
}

FacetSystem make_facet_system(FacetVariant variant, std::vector<Facet> facets, int num_subdomains) {
  for (auto& f : facets) {
    std::sort(f.adjacency.begin(), f.adjacency.end());
    std::sort(f.dofs.begin(), f.dofs.end());
    if (f.dofs.empty()) throw ValidationError("facet with an empty dof set");
    if (f.adjacency.size() < 2) throw ValidationError("facet must link at least two subdomains");
    if (f.kind == FacetKind::bilateral && f.adjacency.size() != 2) throw ValidationError("bilateral facet must link exactly two subdomains");
    for (int s : f.adjacency)
      if (s < 0 || s >= num_subdomains) throw ValidationError("facet adjacency refers to an unknown subdomain");
  }
  std::sort(facets.begin(), facets.end(), [](const Facet& a, const Facet& b) {
    if (a.adjacency != b.adjacency) return a.adjacency < b.adjacency;
    return a.dofs.front() < b.dofs.front();
  });
  FacetSystem s;
  s.variant = variant;
  s.facets = std::move(facets);
  s.per_subdomain.assign(num_subdomains, {});
  for (Index f = 0; f < s.facets.size(); ++f)
    for (int i : s.facets[f].adjacency) s.per_subdomain[i].push_back(f);
  return s;
}

std::vector<char> spanning_tree(const std::vector<int>& nodes, const std::vector<Edge>& edges) {
  std::map<int, int> slot;
  for (Index n = 0; n < nodes.size(); ++n) slot[nodes[n]] = static_cast<int>(n);
  std::vector<int> parent(nodes.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::vector<Index> order(edges.size());
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return edges[a] < edges[b]; });
  std::vector<char> in_tree(edges.size(), 0);
  for (Index e : order) {
    const int a = find(slot.at(edges[e].first)), b = find(slot.at(edges[e].second));
    if (a == b) continue;
    parent[a] = b;
    in_tree[e] = 1;
  }
  return in_tree;
}

namespace {

std::map<Edge, std::vector<Index>> pairwise_dof_sets(const decomp::Multiplicities& mult) {
  std::map<Edge, std::vector<Index>> sets;
  for (Index k : mult.interface_dofs) {
    const auto& nk = mult.sharing[k];
    for (Index a = 0; a < nk.size(); ++a)
      for (Index b = a + 1; b < nk.size(); ++b) sets[{nk[a], nk[b]}].push_back(k);
  }
  return sets;
}

std::vector<Edge> all_pairs(const std::vector<int>& nodes) {
  std::vector<Edge> e;
  for (Index a = 0; a < nodes.size(); ++a)
    for (Index b = a + 1; b < nodes.size(); ++b) e.push_back({nodes[a], nodes[b]});
  return e;
}

}  // namespace

FacetSystem build_bilateral(const decomp::Multiplicities& mult, int num_subdomains, FacetVariant variant) {
  if (variant == FacetVariant::globs) throw ValidationError("build_bilateral: globs is not a bilateral variant");
  auto sets = pairwise_dof_sets(mult);
  if (variant == FacetVariant::non_redundant) {
    // per dof: keep k only on the spanning-tree edges of its complete graph
    for (Index k : mult.interface_dofs) {
      const auto& nk = mult.sharing[k];
      const auto edges = all_pairs(nk);
      const auto tree = spanning_tree(nk, edges);
      for (Index e = 0; e < edges.size(); ++e) {
        if (tree[e]) continue;
        auto& d = sets[edges[e]];
        d.erase(std::remove(d.begin(), d.end(), k), d.end());
      }
    }
  }
  std::vector<Facet> facets;
  for (auto& [pair, dofs] : sets) {
    if (dofs.empty()) continue;
    if (variant == FacetVariant::properly_closed) {
      const bool keep = std::any_of(dofs.begin(), dofs.end(), [&](Index k) { return mult.mu[k] == 2; });
      if (!keep) continue;
    }
    facets.push_back({{pair.first, pair.second}, dofs, FacetKind::bilateral});
  }
  return make_facet_system(variant, std::move(facets), num_subdomains);
}

FacetSystem build_globs(const decomp::Multiplicities& mult, int num_subdomains) {
  std::map<std::vector<int>, std::vector<Index>> classes;
  for (Index k : mult.interface_dofs) classes[mult.sharing[k]].push_back(k);
  std::vector<Facet> facets;
  for (auto& [adj, dofs] : classes) facets.push_back({adj, dofs, FacetKind::glob});
  return make_facet_system(FacetVariant::globs, std::move(facets), num_subdomains);
}

FacetSystem build_facets(const decomp::Multiplicities& mult, int num_subdomains, FacetVariant variant) {
  return variant == FacetVariant::globs ? build_globs(mult, num_subdomains)
                                        : build_bilateral(mult, num_subdomains, variant);
}

AdmissibilityReport check_admissibility(const FacetSystem& system, const decomp::Multiplicities& mult) {
  AdmissibilityReport rep;
  rep.compatible = true;
  std::vector<std::vector<Index>> facets_of_dof(mult.mu.size());
  for (Index f = 0; f < system.facets.size(); ++f) {
    const auto& F = system.facets[f];
    for (Index k : F.dofs) {
      if (k >= mult.mu.size()) {
        rep.compatible = false;
        continue;
      }
      facets_of_dof[k].push_back(f);
      const auto& nk = mult.sharing[k];
      if (!std::includes(nk.begin(), nk.end(), F.adjacency.begin(), F.adjacency.end())) rep.compatible = false;
    }
  }
  rep.covers_interface = true;
  for (Index k : mult.interface_dofs) {
    DofGraph g;
    g.dof = k;
    g.nodes = mult.sharing[k];
    for (Index f : facets_of_dof[k]) {
      const auto& adj = system.facets[f].adjacency;
      for (Index a = 0; a < adj.size(); ++a)
        for (Index b = a + 1; b < adj.size(); ++b) g.edges.push_back({adj[a], adj[b]});
    }
    std::sort(g.edges.begin(), g.edges.end());
    g.edges.erase(std::unique(g.edges.begin(), g.edges.end()), g.edges.end());
    const auto tree = spanning_tree(g.nodes, g.edges);
    const long tree_edges = std::count(tree.begin(), tree.end(), 1);
    g.connected = tree_edges + 1 == static_cast<long>(g.nodes.size());
    g.cycles = system.bilateral() ? static_cast<long>(g.edges.size()) + 1 - static_cast<long>(g.nodes.size()) : 0;
    if (facets_of_dof[k].empty()) {
      rep.covers_interface = false;
      rep.uncovered_dofs.push_back(k);
    }
    if (!g.connected) rep.disconnected_dofs.push_back(k);
    if (g.connected) rep.total_cycles += g.cycles;
    rep.graphs.push_back(std::move(g));
  }
  for (Index k = 0; k < mult.mu.size(); ++k) {
    if (mult.mu[k] < 2 && !facets_of_dof[k].empty()) rep.compatible = false;
  }
  rep.admissible = rep.compatible && rep.covers_interface && rep.disconnected_dofs.empty();
  return rep;
}

void write_facets(std::ostream& os, const FacetSystem& s) {
  for (const auto& f : s.facets) {
    os << to_string(f.kind) << " |";
    for (int i : f.adjacency) os << ' ' << i;
    os << " |";
    for (Index k : f.dofs) os << ' ' << k;
    os << '\n';
  }
}

}  // namespace schwarzlab::facets
