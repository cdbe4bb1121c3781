#include <schwarzlab/meshfem/assemble.hpp>

#include <schwarzlab/linalg/factorization.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace schwarzlab::meshfem {

std::string_view to_string(ProblemKind k) {
  switch (k) {
    case ProblemKind::laplace:
      return "laplace";
    case ProblemKind::reaction_diffusion:
      return "reaction_diffusion";
    case ProblemKind::helmholtz:
      return "helmholtz";
  }
  return "?";
}

ProblemKind parse_problem_kind(std::string_view s) {
  if (s == "laplace") return ProblemKind::laplace;
  if (s == "reaction_diffusion") return ProblemKind::reaction_diffusion;
  if (s == "helmholtz") return ProblemKind::helmholtz;
  throw ValidationError("unknown problem '" + std::string(s) + "' (expected laplace, reaction_diffusion or helmholtz)");
}

BoundarySpec default_boundary(ProblemKind k) {
  return BoundarySpec::all(k == ProblemKind::helmholtz ? BoundaryKind::robin : BoundaryKind::dirichlet);
}

SparseMatrix combine(const SparseMatrix& a0, const SparseMatrix& a1, const SparseMatrix& a2, bool wave) {
  const Scalar c1 = wave ? kI : Scalar(1.0);
  const Scalar c2 = wave ? Scalar(-1.0) : Scalar(1.0);
  return add(add(a0, a1, 1.0, c1), a2, 1.0, c2);
}

SparseMatrix GlobalProblem::combined() const { return combine(A0, A1, A2, wave); }

namespace {

struct ElementData {
  double stiff[3][3];
  double mass[3][3];  // consistent, unscaled
  double area;
};

ElementData element_data(const StructuredMesh& mesh, Index e) {
  const auto& t = mesh.triangles[e];
  ElementData d{};
  d.area = signed_area(mesh, e);
  double b[3], c[3];
  for (int i = 0; i < 3; ++i) {
    const auto& p1 = mesh.nodes[t[(i + 1) % 3]];
    const auto& p2 = mesh.nodes[t[(i + 2) % 3]];
    b[i] = p1[1] - p2[1];
    c[i] = p2[0] - p1[0];
  }
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      d.stiff[i][j] = (b[i] * b[j] + c[i] * c[j]) / (4.0 * d.area);
      d.mass[i][j] = d.area / 12.0 * (i == j ? 2.0 : 1.0);
    }
  }
  return d;
}

double edge_length(const StructuredMesh& mesh, const BoundaryEdge& e) {
  const auto& a = mesh.nodes[e.a];
  const auto& b = mesh.nodes[e.b];
  return std::hypot(b[0] - a[0], b[1] - a[1]);
}

double quantum_for(double max_entry) {
  if (max_entry <= 0.0) return 0.0;
  return std::ldexp(1.0, std::ilogb(max_entry) - 46);
}

double quantize(double v, double q) { return q > 0.0 ? std::nearbyint(v / q) * q : v; }

double effective_kappa(const ProblemParams& p) { return p.kind == ProblemKind::laplace ? 0.0 : p.kappa; }

}  // namespace

AssemblyScales assembly_scales(const StructuredMesh& mesh, const ProblemParams& params) {
  const double k2 = effective_kappa(params) * effective_kappa(params);
  double mmax = 0.0, fmax = 0.0;
  for (Index e = 0; e < mesh.num_elements(); ++e) {
    const ElementData d = element_data(mesh, e);
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        mmax = std::max({mmax, std::abs(d.stiff[i][j]), k2 * d.mass[i][j], params.loss * d.mass[i][j]});
      }
    }
    fmax = std::max(fmax, std::abs(params.source.value) * d.area / 3.0);
  }
  for (const auto& be : mesh.boundary_edges) {
    if (be.kind == BoundaryKind::robin) mmax = std::max(mmax, params.eta * edge_length(mesh, be) / 2.0);
  }
  return {quantum_for(mmax), quantum_for(fmax)};
}

OperatorParts assemble_elements(const StructuredMesh& mesh, const ProblemParams& params,
                                std::span<const Index> elements, std::span<const long> node_dof, Index ndofs,
                                const AssemblyScales& scales) {
  const double k2 = effective_kappa(params) * effective_kappa(params);
  const double q = scales.matrix_quantum;
  std::vector<Triplet> t0, t1, t2;
  OperatorParts out;
  out.f.assign(ndofs, Scalar(0.0));
  std::vector<char> owned(mesh.num_elements(), 0);
  for (Index e : elements) {
    owned[e] = 1;
    const ElementData d = element_data(mesh, e);
    const auto& tri = mesh.triangles[e];
    for (int i = 0; i < 3; ++i) {
      const long di = node_dof[tri[i]];
      if (di < 0) continue;
      for (int j = 0; j < 3; ++j) {
        const long dj = node_dof[tri[j]];
        if (dj < 0) continue;
        const Index r = static_cast<Index>(di), c = static_cast<Index>(dj);
        t0.push_back({r, c, quantize(d.stiff[i][j], q)});
        if (k2 != 0.0) t2.push_back({r, c, quantize(k2 * d.mass[i][j], q)});
        if (params.loss != 0.0) t1.push_back({r, c, quantize(params.loss * d.mass[i][j], q)});
      }
      if (params.source.kind == SourceSpec::Kind::constant) {
        out.f[static_cast<Index>(di)] += quantize(params.source.value * d.area / 3.0, scales.load_quantum);
      }
    }
  }
  for (const auto& be : mesh.boundary_edges) {
    if (be.kind != BoundaryKind::robin || !owned[be.element]) continue;
    const double w = quantize(params.eta * edge_length(mesh, be) / 2.0, q);
    for (Index n : {be.a, be.b}) {
      const long dn = node_dof[n];
      if (dn >= 0) t1.push_back({static_cast<Index>(dn), static_cast<Index>(dn), w});
    }
  }
  out.A0 = SparseMatrix::from_triplets(ndofs, ndofs, t0);
  out.A1 = SparseMatrix::from_triplets(ndofs, ndofs, t1);
  out.A2 = SparseMatrix::from_triplets(ndofs, ndofs, t2);
  return out;
}

GlobalProblem assemble(const StructuredMesh& mesh, const ProblemParams& params) {
  if (params.eta <= 0.0) throw ValidationError("assemble: eta must be positive");
  if (params.kappa < 0.0) throw ValidationError("assemble: kappa must be non-negative");
  if (params.loss < 0.0) throw ValidationError("assemble: loss must be non-negative");
  GlobalProblem p;
  p.params = params;
  p.wave = params.kind == ProblemKind::helmholtz;
  p.alpha = p.wave ? kI : Scalar(1.0);
  p.node_dof.assign(mesh.num_nodes(), -1);
  for (Index k = 0; k < mesh.num_nodes(); ++k) {
    if (mesh.tags[k] == NodeTag::dirichlet) continue;
    p.node_dof[k] = static_cast<long>(p.dof_node.size());
    p.dof_node.push_back(k);
  }
  p.scales = assembly_scales(mesh, params);
  std::vector<Index> all(mesh.num_elements());
  for (Index e = 0; e < all.size(); ++e) all[e] = e;
  OperatorParts parts = assemble_elements(mesh, params, all, p.node_dof, p.dof_node.size(), p.scales);
  p.A0 = std::move(parts.A0);
  p.A1 = std::move(parts.A1);
  p.A2 = std::move(parts.A2);
  p.f = std::move(parts.f);
  if (params.source.kind == SourceSpec::Kind::point && !p.dof_node.empty()) {
    Index best = p.dof_node.front();
    double bestd = std::numeric_limits<double>::infinity();
    for (Index n : p.dof_node) {
      const double dx = mesh.nodes[n][0] - params.source.x, dy = mesh.nodes[n][1] - params.source.y;
      const double dd = dx * dx + dy * dy;
      if (dd < bestd) {
        bestd = dd;
        best = n;
      }
    }
    p.point_dof = static_cast<Index>(p.node_dof[best]);
    p.f[*p.point_dof] += params.source.value;
  }
  return p;
}

GlobalProblem make_problem(SparseMatrix a0, SparseMatrix a1, SparseMatrix a2, Vector f, bool wave) {
  GlobalProblem p;
  p.A0 = std::move(a0);
  p.A1 = std::move(a1);
  p.A2 = std::move(a2);
  p.f = std::move(f);
  p.wave = wave;
  p.alpha = wave ? kI : Scalar(1.0);
  p.params.kind = wave ? ProblemKind::helmholtz : ProblemKind::reaction_diffusion;
  return p;
}

void check_well_posed(const GlobalProblem& p) {
  try {
    (void)factorize(p.combined());
  } catch (const SingularMatrixError& e) {
    throw ValidationError(std::string("ill-posed instance: global operator is singular to tolerance (") + e.what() + ")");
  }
}

Vector direct_solve(const GlobalProblem& p) {
  try {
    return factorize(p.combined()).solve(p.f);
  } catch (const SingularMatrixError& e) {
    throw ValidationError(std::string("ill-posed instance: global operator is singular to tolerance (") + e.what() + ")");
  }
}

}  // namespace schwarzlab::meshfem
