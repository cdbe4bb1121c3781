#pragma once

#include <schwarzlab/decomp/decomposition.hpp>

#include <functional>
#include <iosfwd>
#include <utility>

namespace schwarzlab::facets {

enum class FacetKind { bilateral, glob };
enum class FacetVariant { bilateral_max, properly_closed, non_redundant, globs };

std::string_view to_string(FacetKind k);
std::string_view to_string(FacetVariant v);
FacetVariant parse_facet_variant(std::string_view s);

struct Facet {
  std::vector<int> adjacency;  // N_F, ascending
  std::vector<Index> dofs;     // D_F, ascending global dofs
  FacetKind kind = FacetKind::bilateral;
};

struct FacetSystem {
  FacetVariant variant = FacetVariant::bilateral_max;
  // sorted by (adjacency, min dof)
  std::vector<Facet> facets;
  // per subdomain: facet ids in trace order
  std::vector<std::vector<Index>> per_subdomain;

  bool bilateral() const { return variant != FacetVariant::globs; }
  int num_subdomains() const { return static_cast<int>(per_subdomain.size()); }
  // -1 if no facet has this adjacency pair
  long find_pair(int i, int j) const;
};

// Sorts the facets and derives the per-subdomain lists.
FacetSystem make_facet_system(FacetVariant variant, std::vector<Facet> facets, int num_subdomains);

FacetSystem build_bilateral(const decomp::Multiplicities& mult, int num_subdomains, FacetVariant variant);
FacetSystem build_globs(const decomp::Multiplicities& mult, int num_subdomains);
FacetSystem build_facets(const decomp::Multiplicities& mult, int num_subdomains, FacetVariant variant);

using Edge = std::pair<int, int>;

struct DofGraph {
  Index dof = 0;
  std::vector<int> nodes;   // N_k
  std::vector<Edge> edges;  // E_k, lexicographic
  bool connected = false;
  long cycles = 0;          // |E_k| + 1 - |N_k| for bilateral systems
};

struct AdmissibilityReport {
  std::vector<DofGraph> graphs;  // one per interface dof, ascending
  bool admissible = false;
  bool covers_interface = false;
  bool compatible = false;
  std::vector<Index> disconnected_dofs;
  std::vector<Index> uncovered_dofs;
  long total_cycles = 0;
};

AdmissibilityReport check_admissibility(const FacetSystem& system, const decomp::Multiplicities& mult);

// Kruskal over lexicographically sorted edges; returns the flags of tree edges.
std::vector<char> spanning_tree(const std::vector<int>& nodes, const std::vector<Edge>& edges);

// "kind | N_F | D_F" per line
void write_facets(std::ostream& os, const FacetSystem& s);

// Maps (subdomain, facet id, global dof) to a trace index, -1 if absent.
struct TraceIndexer {
  Index dimension = 0;
  std::function<long(int, Index, Index)> index;
};

// Cycle basis of the redundancy space: one +-1 vector per independent cycle
// of each connectivity graph. Empty for glob systems.
struct RedundancyBasis {
  std::vector<Vector> vectors;
  std::vector<Index> dof_of_vector;
  Index dimension() const { return vectors.size(); }
};

RedundancyBasis redundancy_basis(const FacetSystem& system, const decomp::Multiplicities& mult,
                                 const TraceIndexer& trace);

}  // namespace schwarzlab::facets
