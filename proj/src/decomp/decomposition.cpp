#include <schwarzlab/decomp/decomposition.hpp>

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

namespace schwarzlab::decomp {

using meshfem::GlobalProblem;
using meshfem::OperatorParts;
using meshfem::StructuredMesh;

Partition partition_grid(const StructuredMesh& mesh, Index px, Index py) {
  if (px < 1 || py < 1 || mesh.nx % px != 0 || mesh.ny % py != 0) {
    throw ValidationError("partition_grid: " + std::to_string(px) + "x" + std::to_string(py) +
                          " blocks do not divide the " + std::to_string(mesh.nx) + "x" + std::to_string(mesh.ny) +
                          " grid");
  }
  const Index bx = mesh.nx / px, by = mesh.ny / py;
  std::vector<int> owner(mesh.num_elements());
  for (Index e = 0; e < mesh.num_elements(); ++e) {
    const Index cell = mesh.cell_of_element(e);
    const Index i = cell % mesh.nx, j = cell / mesh.nx;
    owner[e] = static_cast<int>((i / bx) + px * (j / by));
  }
  return partition_from_owners(std::move(owner));
}

Partition partition_from_owners(std::vector<int> owner) {
  Partition p;
  int n = 0;
  for (int o : owner) {
    if (o < 0) throw ValidationError("partition: negative owner index");
    n = std::max(n, o + 1);
  }
  p.num_subdomains = n;
  p.elements.resize(n);
  for (Index e = 0; e < owner.size(); ++e) p.elements[owner[e]].push_back(e);
  for (int i = 0; i < n; ++i) {
    if (p.elements[i].empty()) throw ValidationError("partition: subdomain " + std::to_string(i) + " owns no element");
  }
  p.owner = std::move(owner);
  return p;
}

void write_partition(std::ostream& os, const Partition& p) {
  for (int o : p.owner) os << o << '\n';
}

Partition read_partition(std::istream& is) {
  std::vector<int> owner;
  int o;
  while (is >> o) owner.push_back(o);
  if (!is.eof()) throw Error("read_partition: malformed owner list");
  return partition_from_owners(std::move(owner));
}

long Restriction::local_index(int i, Index k) const {
  const auto& g = local_to_global[i];
  auto it = std::lower_bound(g.begin(), g.end(), k);
  if (it == g.end() || *it != k) return -1;
  return static_cast<long>(it - g.begin());
}

Vector Restriction::restrict_to(int i, std::span<const Scalar> global) const {
  if (global.size() != global_size) throw DimensionError("restrict: global vector has the wrong length");
  const auto& g = local_to_global[i];
  Vector out(g.size());
  for (Index l = 0; l < g.size(); ++l) out[l] = global[g[l]];
  return out;
}

std::vector<Index> Restriction::offsets() const {
  std::vector<Index> off(local_to_global.size() + 1, 0);
  for (Index i = 0; i < local_to_global.size(); ++i) off[i + 1] = off[i] + local_to_global[i].size();
  return off;
}

Vector Restriction::restrict_all(std::span<const Scalar> global) const {
  Vector out;
  out.reserve(offsets().back());
  for (int i = 0; i < num_subdomains(); ++i) {
    const Vector ui = restrict_to(i, global);
    out.insert(out.end(), ui.begin(), ui.end());
  }
  return out;
}

Vector Restriction::assemble_all(std::span<const Scalar> stacked) const {
  const auto off = offsets();
  if (stacked.size() != off.back()) throw DimensionError("assemble: stacked vector has the wrong length");
  Vector out(global_size, Scalar(0.0));
  for (int i = 0; i < num_subdomains(); ++i) {
    const auto& g = local_to_global[i];
    for (Index l = 0; l < g.size(); ++l) out[g[l]] += stacked[off[i] + l];
  }
  return out;
}

namespace {

SparseMatrix incidence(const std::vector<Index>& g, Index n) {
  std::vector<Triplet> t;
  t.reserve(g.size());
  for (Index l = 0; l < g.size(); ++l) t.push_back({l, g[l], 1.0});
  return SparseMatrix::from_triplets(g.size(), n, t);
}

Restriction make_restriction(Index n, std::vector<std::vector<Index>> l2g) {
  Restriction r;
  r.global_size = n;
  for (const auto& g : l2g) {
    for (Index l = 0; l < g.size(); ++l) {
      if (g[l] >= n) throw DimensionError("restriction: global index out of range");
      if (l > 0 && g[l] <= g[l - 1]) throw ValidationError("restriction: local-to-global map must be strictly ascending");
    }
    r.R.push_back(incidence(g, n));
  }
  r.local_to_global = std::move(l2g);
  return r;
}

}  // namespace

Multiplicities compute_multiplicities(const Restriction& r) {
  Multiplicities m;
  m.mu.assign(r.global_size, 0);
  m.sharing.assign(r.global_size, {});
  for (int i = 0; i < r.num_subdomains(); ++i) {
    for (Index k : r.local_to_global[i]) {
      ++m.mu[k];
      m.sharing[k].push_back(i);
    }
  }
  for (Index k = 0; k < r.global_size; ++k) {
    if (m.mu[k] < 1) throw ValidationError("restriction does not cover global dof " + std::to_string(k) + " (ker R must be trivial)");
    if (m.mu[k] >= 2) m.interface_dofs.push_back(k);
    m.mu_max = std::max(m.mu_max, m.mu[k]);
  }
  return m;
}

std::vector<std::vector<char>> bubble_dofs(const Restriction& r, const Multiplicities& m) {
  std::vector<std::vector<char>> mask(r.num_subdomains());
  for (int i = 0; i < r.num_subdomains(); ++i) {
    const auto& g = r.local_to_global[i];
    mask[i].resize(g.size());
    for (Index l = 0; l < g.size(); ++l) mask[i][l] = m.mu[g[l]] == 1 ? 1 : 0;
  }
  return mask;
}

Decomposition build_restrictions(const StructuredMesh& mesh, const Partition& partition, const GlobalProblem& problem) {
  if (partition.owner.size() != mesh.num_elements()) {
    throw ValidationError("partition does not match the mesh element count");
  }
  if (problem.node_dof.size() != mesh.num_nodes()) throw ValidationError("problem was not assembled on this mesh");
  const int nsub = partition.num_subdomains;
  std::vector<std::vector<Index>> l2g(nsub);
  for (int i = 0; i < nsub; ++i) {
    std::set<Index> dofs;
    for (Index e : partition.elements[i]) {
      for (Index node : mesh.triangles[e]) {
        if (problem.node_dof[node] >= 0) dofs.insert(static_cast<Index>(problem.node_dof[node]));
      }
    }
    l2g[i].assign(dofs.begin(), dofs.end());
  }
  std::vector<OperatorParts> parts(nsub);
  for (int i = 0; i < nsub; ++i) {
    std::vector<long> node_local(mesh.num_nodes(), -1);
    for (Index l = 0; l < l2g[i].size(); ++l) node_local[problem.dof_node[l2g[i][l]]] = static_cast<long>(l);
    parts[i] = meshfem::assemble_elements(mesh, problem.params, partition.elements[i], node_local, l2g[i].size(),
                                          problem.scales);
  }
  Decomposition d = make_decomposition(problem.size(), std::move(l2g), std::move(parts), problem.wave);
  if (problem.point_dof) {
    const Index k = *problem.point_dof;
    const int owner = d.mult.sharing[k].front();
    d.local.f[owner][static_cast<Index>(d.restriction.local_index(owner, k))] += problem.params.source.value;
  }
  return d;
}

Decomposition make_decomposition(Index global_size, std::vector<std::vector<Index>> local_to_global,
                                 std::vector<OperatorParts> parts, bool wave) {
  if (parts.size() != local_to_global.size()) throw DimensionError("one operator set per subdomain is required");
  Decomposition d;
  d.restriction = make_restriction(global_size, std::move(local_to_global));
  d.mult = compute_multiplicities(d.restriction);
  d.local.wave = wave;
  for (Index i = 0; i < parts.size(); ++i) {
    const Index ni = d.restriction.local_size(static_cast<int>(i));
    if (parts[i].A0.rows() != ni || parts[i].A1.rows() != ni || parts[i].A2.rows() != ni || parts[i].f.size() != ni) {
      throw DimensionError("local operator size does not match the local dof count");
    }
    d.local.A0.push_back(std::move(parts[i].A0));
    d.local.A1.push_back(std::move(parts[i].A1));
    d.local.A2.push_back(std::move(parts[i].A2));
    d.local.f.push_back(std::move(parts[i].f));
  }
  d.local.bubble = bubble_dofs(d.restriction, d.mult);
  return d;
}

SparseMatrix assemble_global(const Restriction& r, std::span<const SparseMatrix> blocks) {
  std::vector<Triplet> t;
  for (int i = 0; i < r.num_subdomains(); ++i) {
    const auto& g = r.local_to_global[i];
    for (const auto& x : blocks[i].triplets()) t.push_back({g[x.row], g[x.col], x.value});
  }
  return SparseMatrix::from_triplets(r.global_size, r.global_size, t);
}

AssemblingReport check_assembling(const Restriction& r, const LocalOperators& local, const GlobalProblem& problem) {
  AssemblingReport rep;
  if (problem.size() != r.global_size) throw DimensionError("check_assembling: size mismatch");
  double scale = 0.0;
  auto compare = [&](const SparseMatrix& sum, const SparseMatrix& ref) {
    scale = std::max(scale, ref.max_abs());
    const SparseMatrix diff = add(sum, ref, 1.0, -1.0);
    for (const auto& x : diff.triplets()) {
      const double v = std::abs(x.value);
      if (v > rep.matrix_deviation) {
        rep.matrix_deviation = v;
        rep.worst_row = x.row;
        rep.worst_col = x.col;
      }
    }
  };
  std::vector<SparseMatrix> combined;
  for (int i = 0; i < r.num_subdomains(); ++i) combined.push_back(local.A(i));
  compare(assemble_global(r, local.A0), problem.A0);
  compare(assemble_global(r, local.A1), problem.A1);
  compare(assemble_global(r, local.A2), problem.A2);
  compare(assemble_global(r, combined), problem.combined());

  Vector fsum(r.global_size, Scalar(0.0));
  for (int i = 0; i < r.num_subdomains(); ++i) {
    const auto& g = r.local_to_global[i];
    for (Index l = 0; l < g.size(); ++l) fsum[g[l]] += local.f[i][l];
  }
  double fscale = 0.0;
  for (Index k = 0; k < fsum.size(); ++k) {
    fscale = std::max(fscale, std::abs(problem.f[k]));
    const double v = std::abs(fsum[k] - problem.f[k]);
    if (v > rep.load_deviation) {
      rep.load_deviation = v;
      rep.worst_load = k;
    }
  }
  rep.exact = rep.matrix_deviation == 0.0 && rep.load_deviation == 0.0;
  rep.passed = rep.exact || (rep.matrix_deviation <= 1e-14 * std::max(scale, 1.0) &&
                             rep.load_deviation <= 1e-14 * std::max(fscale, 1.0));
  std::ostringstream msg;
  if (rep.exact) {
    msg << "assembling property holds exactly";
  } else {
    msg << "max operator deviation " << rep.matrix_deviation << " at (" << rep.worst_row << ", " << rep.worst_col
        << "), max load deviation " << rep.load_deviation << " at " << rep.worst_load;
  }
  rep.message = msg.str();
  return rep;
}

}  // namespace schwarzlab::decomp
