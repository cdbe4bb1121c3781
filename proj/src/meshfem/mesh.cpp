#include <schwarzlab/meshfem/mesh.hpp>

#include <cstdio>
#include <fstream>
#include <ostream>

namespace schwarzlab::meshfem {

std::string_view to_string(BoundaryKind k) {
  switch (k) {
    case BoundaryKind::dirichlet:
      return "dirichlet";
    case BoundaryKind::robin:
      return "robin";
    case BoundaryKind::neumann:
      return "neumann";
  }
  return "?";
}

BoundaryKind parse_boundary_kind(std::string_view s) {
  if (s == "dirichlet") return BoundaryKind::dirichlet;
  if (s == "robin") return BoundaryKind::robin;
  if (s == "neumann") return BoundaryKind::neumann;
  throw ValidationError("unknown boundary kind '" + std::string(s) + "' (expected dirichlet, robin or neumann)");
}

std::string_view to_string(NodeTag t) {
  switch (t) {
    case NodeTag::interior:
      return "interior";
    case NodeTag::dirichlet:
      return "dirichlet";
    case NodeTag::robin:
      return "robin";
    case NodeTag::neumann:
      return "neumann";
  }
  return "?";
}

namespace {

NodeTag tag_of(BoundaryKind k) {
  switch (k) {
    case BoundaryKind::dirichlet:
      return NodeTag::dirichlet;
    case BoundaryKind::robin:
      return NodeTag::robin;
    case BoundaryKind::neumann:
      return NodeTag::neumann;
  }
  return NodeTag::interior;
}

int rank(NodeTag t) {
  switch (t) {
    case NodeTag::interior:
      return 0;
    case NodeTag::neumann:
      return 1;
    case NodeTag::robin:
      return 2;
    case NodeTag::dirichlet:
      return 3;
  }
  return 0;
}

// corners take the strongest tag: dirichlet > robin > neumann
void merge(NodeTag& t, BoundaryKind k) {
  const NodeTag n = tag_of(k);
  if (rank(n) > rank(t)) t = n;
}

}  // namespace

StructuredMesh build_mesh(Index nx, Index ny, const BoundarySpec& boundary) {
  if (nx < 1 || ny < 1) throw ValidationError("build_mesh: nx and ny must be at least 1");
  StructuredMesh m;
  m.nx = nx;
  m.ny = ny;
  m.boundary = boundary;
  m.nodes.resize((nx + 1) * (ny + 1));
  m.tags.assign(m.nodes.size(), NodeTag::interior);
  for (Index j = 0; j <= ny; ++j)
    for (Index i = 0; i <= nx; ++i)
      m.nodes[m.node(i, j)] = {static_cast<double>(i) / static_cast<double>(nx),
                               static_cast<double>(j) / static_cast<double>(ny)};
  m.triangles.reserve(2 * nx * ny);
  for (Index j = 0; j < ny; ++j) {
    for (Index i = 0; i < nx; ++i) {
      const Index p00 = m.node(i, j), p10 = m.node(i + 1, j), p11 = m.node(i + 1, j + 1), p01 = m.node(i, j + 1);
      const Index e0 = m.triangles.size();
      m.triangles.push_back({p00, p10, p11});
      m.triangles.push_back({p00, p11, p01});
      if (j == 0) m.boundary_edges.push_back({e0, p00, p10, boundary.bottom});
      if (i == nx - 1) m.boundary_edges.push_back({e0, p10, p11, boundary.right});
      if (j == ny - 1) m.boundary_edges.push_back({e0 + 1, p11, p01, boundary.top});
      if (i == 0) m.boundary_edges.push_back({e0 + 1, p01, p00, boundary.left});
    }
  }
  for (const auto& e : m.boundary_edges) {
    merge(m.tags[e.a], e.kind);
    merge(m.tags[e.b], e.kind);
  }
  return m;
}

double signed_area(const StructuredMesh& m, Index element) {
  const auto& t = m.triangles[element];
  const auto& a = m.nodes[t[0]];
  const auto& b = m.nodes[t[1]];
  const auto& c = m.nodes[t[2]];
  return 0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]));
}

void write_mesh(std::ostream& os, const StructuredMesh& m) {
  char buf[96];
  os << "nodes " << m.num_nodes() << '\n';
  for (Index k = 0; k < m.num_nodes(); ++k) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g", m.nodes[k][0], m.nodes[k][1]);
    os << buf << ' ' << to_string(m.tags[k]) << '\n';
  }
  os << "elements " << m.num_elements() << '\n';
  for (const auto& t : m.triangles) os << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
}

void write_mesh(const std::string& path, const StructuredMesh& m) {
  std::ofstream os(path);
  if (!os) throw Error("cannot open " + path + " for writing");
  write_mesh(os, m);
}

}  // namespace schwarzlab::meshfem
