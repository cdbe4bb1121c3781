#pragma once

#include <schwarzlab/linalg/types.hpp>

#include <array>
#include <iosfwd>
#include <string>

namespace schwarzlab::meshfem {

enum class BoundaryKind { dirichlet, robin, neumann };
enum class NodeTag { interior, dirichlet, robin, neumann };

std::string_view to_string(BoundaryKind k);
BoundaryKind parse_boundary_kind(std::string_view s);
std::string_view to_string(NodeTag t);

struct BoundarySpec {
  BoundaryKind left = BoundaryKind::robin;
  BoundaryKind right = BoundaryKind::robin;
  BoundaryKind bottom = BoundaryKind::robin;
  BoundaryKind top = BoundaryKind::robin;

  static BoundarySpec all(BoundaryKind k) { return {k, k, k, k}; }
};

// A boundary segment and the triangle that contains it.
struct BoundaryEdge {
  Index element;
  Index a;
  Index b;
  BoundaryKind kind;
};

// Unit square, (nx+1) x (ny+1) nodes numbered row by row from the lower-left
// corner; every cell is split along its lower-left/upper-right diagonal.
struct StructuredMesh {
  Index nx = 0;
  Index ny = 0;
  std::vector<std::array<double, 2>> nodes;
  std::vector<std::array<Index, 3>> triangles;
  std::vector<NodeTag> tags;
  std::vector<BoundaryEdge> boundary_edges;
  BoundarySpec boundary;

  Index node(Index i, Index j) const { return j * (nx + 1) + i; }
  Index num_nodes() const { return nodes.size(); }
  Index num_elements() const { return triangles.size(); }
  // Cell (i, j) owns elements 2 (j nx + i) and 2 (j nx + i) + 1.
  Index cell_of_element(Index e) const { return e / 2; }
};

StructuredMesh build_mesh(Index nx, Index ny, const BoundarySpec& boundary);

double signed_area(const StructuredMesh& m, Index element);

// "nodes <n>" followed by "x y tag" lines, then "elements <m>" and "a b c".
void write_mesh(std::ostream& os, const StructuredMesh& m);
void write_mesh(const std::string& path, const StructuredMesh& m);

}  // namespace schwarzlab::meshfem
