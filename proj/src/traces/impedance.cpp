#include <schwarzlab/traces/impedance.hpp>

#include <schwarzlab/linalg/spectral.hpp>

#include <algorithm>
#include <cmath>
#include <map>

namespace schwarzlab::traces {

std::string_view to_string(ImpedanceVariant v) {
  switch (v) {
    case ImpedanceVariant::scalar:
      return "scalar";
    case ImpedanceVariant::facet_lumped_mass:
      return "facet_lumped_mass";
    case ImpedanceVariant::glob_block:
      return "glob_block";
    case ImpedanceVariant::diagonal:
      return "diagonal";
    case ImpedanceVariant::interface_mass:
      return "interface_mass";
    case ImpedanceVariant::local_operator:
      return "local_operator";
  }
  return "?";
}

ImpedanceVariant parse_impedance_variant(std::string_view s) {
  if (s == "scalar") return ImpedanceVariant::scalar;
  if (s == "facet_lumped_mass") return ImpedanceVariant::facet_lumped_mass;
  if (s == "glob_block") return ImpedanceVariant::glob_block;
  if (s == "diagonal") return ImpedanceVariant::diagonal;
  if (s == "interface_mass") return ImpedanceVariant::interface_mass;
  throw ValidationError("unknown impedance variant '" + std::string(s) +
                        "' (expected scalar, facet_lumped_mass, glob_block, diagonal or interface_mass)");
}

InterfaceGeometry interface_geometry(const meshfem::StructuredMesh& mesh, const decomp::Partition& partition,
                                     const meshfem::GlobalProblem& problem) {
  InterfaceGeometry g;
  g.edges.resize(partition.num_subdomains);
  std::map<std::pair<Index, Index>, std::vector<int>> owners;
  for (Index e = 0; e < mesh.num_elements(); ++e) {
    const auto& t = mesh.triangles[e];
    for (int s = 0; s < 3; ++s) {
      const Index a = t[s], b = t[(s + 1) % 3];
      owners[{std::min(a, b), std::max(a, b)}].push_back(partition.owner[e]);
    }
  }
  auto dof = [&](Index node) { return problem.node_dof[node] < 0 ? kNoDof : static_cast<Index>(problem.node_dof[node]); };
  for (const auto& [edge, own] : owners) {
    if (own.size() != 2 || own[0] == own[1]) continue;
    const Index da = dof(edge.first), db = dof(edge.second);
    if (da == kNoDof && db == kNoDof) continue;
    const auto& pa = mesh.nodes[edge.first];
    const auto& pb = mesh.nodes[edge.second];
    const double len = std::hypot(pb[0] - pa[0], pb[1] - pa[1]);
    g.edges[own[0]].push_back({da, db, len});
    g.edges[own[1]].push_back({da, db, len});
  }
  g.dof_coords.resize(problem.size());
  for (Index k = 0; k < problem.size(); ++k) g.dof_coords[k] = mesh.nodes[problem.dof_node[k]];
  return g;
}

namespace {

double quantize(double v, double q) { return q > 0.0 ? std::nearbyint(v / q) * q : v; }

bool positive_definite(const SparseMatrix& m) {
  if (m.rows() == 0) return true;
  if (m.rows() <= 600) {
    const auto ev = hermitian_eigenvalues(DenseMatrix::from_sparse(m));
    return ev.front() > 0.0;
  }
  for (Index r = 0; r < m.rows(); ++r)
    if (!(m.at(r, r).real() > 0.0)) return false;
  try {
    (void)factorize(m);
  } catch (const SingularMatrixError&) {
    return false;
  }
  return true;
}

}  // namespace

ImpedanceOperator make_impedance(std::vector<SparseMatrix> blocks, ImpedanceVariant variant, double sigma,
                                 const TraceOperator& trace, const facets::FacetSystem* system) {
  if (static_cast<int>(blocks.size()) != trace.num_subdomains()) throw DimensionError("impedance: one block per subdomain");
  ImpedanceOperator m;
  m.variant_ = variant;
  m.sigma_ = sigma;
  for (int i = 0; i < trace.num_subdomains(); ++i) {
    const auto& b = blocks[i];
    if (b.rows() != trace.local_dimension(i) || b.cols() != b.rows()) throw DimensionError("impedance block has the wrong size");
    if (variant != ImpedanceVariant::local_operator) {
      if (!b.is_real()) throw ValidationError("impedance must be real-valued");
      if (!b.is_symmetric()) throw ValidationError("impedance block is not symmetric");
      if (!positive_definite(b)) throw ValidationError("impedance block of subdomain " + std::to_string(i) + " is not positive definite");
    }
    m.symmetric_ = m.symmetric_ && b.is_symmetric();
    m.offsets_.push_back(m.offsets_.back() + b.rows());
  }
  m.M_ = std::move(blocks);
  m.compound_ = block_diagonal(m.M_);
  for (const auto& b : m.M_) {
    m.factors_.push_back(b.rows() > 0 ? std::make_shared<const DenseFactorization>(factorize(b)) : nullptr);
  }

  if (system == nullptr) {
    m.facet_block_diagonal_ = false;
    m.side_equal_ = false;
    return m;
  }
  // facet of each trace position
  const auto& entries = trace.entries();
  for (int i = 0; i < trace.num_subdomains(); ++i) {
    const auto& b = m.M_[i];
    const Index off = trace.lambda_offsets()[i];
    for (const auto& t : b.triplets()) {
      if (entries[off + t.row].facet != entries[off + t.col].facet) m.facet_block_diagonal_ = false;
    }
  }
  m.side_equal_ = m.facet_block_diagonal_;
  if (m.side_equal_) {
    for (Index f = 0; f < system->facets.size() && m.side_equal_; ++f) {
      const auto& F = system->facets[f];
      auto facet_block = [&](int i) {
        const Index off = trace.lambda_offsets()[i];
        const long first = trace.index(i, f, F.dofs.front());
        DenseMatrix blk(F.dofs.size(), F.dofs.size());
        for (Index a = 0; a < F.dofs.size(); ++a)
          for (Index c = 0; c < F.dofs.size(); ++c)
            blk(a, c) = m.M_[i].at(static_cast<Index>(first) - off + a, static_cast<Index>(first) - off + c);
        return blk;
      };
      const DenseMatrix ref = facet_block(F.adjacency.front());
      for (Index s = 1; s < F.adjacency.size(); ++s) {
        const DenseMatrix other = facet_block(F.adjacency[s]);
        if ((other - ref).max_abs() != 0.0) {
          m.side_equal_ = false;
          break;
        }
      }
    }
  }
  return m;
}

ImpedanceOperator build_impedance(const TraceOperator& trace, const facets::FacetSystem& system,
                                  const ImpedanceParams& params, const InterfaceGeometry* geometry) {
  if (!(params.sigma > 0.0)) throw ValidationError("impedance: sigma must be positive");
  const int nsub = trace.num_subdomains();
  if (!params.side_scale.empty() && static_cast<int>(params.side_scale.size()) != nsub) {
    throw ValidationError("impedance: side_scale needs one factor per subdomain");
  }
  const auto v = params.variant;
  const bool needs_geometry = v == ImpedanceVariant::facet_lumped_mass || v == ImpedanceVariant::glob_block ||
                              v == ImpedanceVariant::interface_mass;
  if (needs_geometry && geometry == nullptr) {
    throw ValidationError(std::string("impedance variant ") + std::string(to_string(v)) + " needs mesh geometry");
  }
  if (v == ImpedanceVariant::local_operator) throw ValidationError("local_operator impedance is built from the local operators");
  if (v == ImpedanceVariant::interface_mass && !trace.has_right_inverse()) {
    throw ValidationError("interface_mass impedance needs each local dof traced once (glob system or no cross points)");
  }
  const auto& entries = trace.entries();
  std::vector<std::vector<Triplet>> trip(nsub);
  for (int i = 0; i < nsub; ++i) {
    const Index off = trace.lambda_offsets()[i];
    const Index n = trace.local_dimension(i);
    // positions of each global dof inside Lambda_i, grouped by facet
    std::map<Index, std::vector<Index>> pos_of_dof;
    for (Index p = 0; p < n; ++p) pos_of_dof[entries[off + p].dof].push_back(p);
    auto same_facet = [&](Index p, Index q) { return entries[off + p].facet == entries[off + q].facet; };
    switch (v) {
      case ImpedanceVariant::scalar:
        for (Index p = 0; p < n; ++p) trip[i].push_back({p, p, params.sigma});
        break;
      case ImpedanceVariant::diagonal:
        for (Index p = 0; p < n; ++p) {
          double w = 1.0;
          if (geometry != nullptr && !geometry->dof_coords.empty()) {
            const auto& x = geometry->dof_coords[entries[off + p].dof];
            w = 1.0 + 0.5 * x[0] + 0.25 * x[1];
          }
          trip[i].push_back({p, p, params.sigma * w});
        }
        break;
      case ImpedanceVariant::facet_lumped_mass:
        for (const auto& e : geometry->edges[i]) {
          for (Index k : {e.a, e.b}) {
            if (k == kNoDof || !pos_of_dof.count(k)) continue;
            for (Index p : pos_of_dof[k]) trip[i].push_back({p, p, params.sigma * e.length / 2.0});
          }
        }
        break;
      case ImpedanceVariant::glob_block:
      case ImpedanceVariant::interface_mass:
        for (const auto& e : geometry->edges[i]) {
          const double d = params.sigma * e.length / 3.0, o = params.sigma * e.length / 6.0;
          for (Index k : {e.a, e.b}) {
            if (k == kNoDof || !pos_of_dof.count(k)) continue;
            for (Index p : pos_of_dof[k]) trip[i].push_back({p, p, d});
          }
          if (e.a == kNoDof || e.b == kNoDof || !pos_of_dof.count(e.a) || !pos_of_dof.count(e.b)) continue;
          for (Index p : pos_of_dof[e.a]) {
            for (Index q : pos_of_dof[e.b]) {
              if (v == ImpedanceVariant::glob_block && !same_facet(p, q)) continue;
              trip[i].push_back({p, q, o});
              trip[i].push_back({q, p, o});
            }
          }
        }
        break;
      case ImpedanceVariant::local_operator:
        break;
    }
  }
  // Each contribution is rounded to a common power-of-two grid before
  // summation, so equal geometry on both sides of a facet gives bitwise equal
  // blocks and sums of impedance entries (FETI-H) cancel exactly.
  double cmax = 0.0;
  for (int i = 0; i < nsub; ++i) {
    const double c = params.side_scale.empty() ? 1.0 : params.side_scale[i];
    if (!(c > 0.0)) throw ValidationError("impedance: side_scale factors must be positive");
    for (auto& t : trip[i]) {
      t.value *= c;
      cmax = std::max(cmax, std::abs(t.value));
    }
  }
  const double q = cmax > 0.0 ? std::ldexp(1.0, std::ilogb(cmax) - 44) : 0.0;
  std::vector<SparseMatrix> blocks;
  for (int i = 0; i < nsub; ++i) {
    for (auto& t : trip[i]) t.value = quantize(t.value.real(), q);
    blocks.push_back(SparseMatrix::from_triplets(trace.local_dimension(i), trace.local_dimension(i), trip[i]));
  }
  return make_impedance(std::move(blocks), v, params.sigma, trace, &system);
}

ImpedanceOperator impedance_from_local(const TraceOperator& trace, const decomp::LocalOperators& local) {
  if (!trace.is_identity()) throw ValidationError("M = A requires the identity trace");
  std::vector<SparseMatrix> blocks;
  for (int i = 0; i < trace.num_subdomains(); ++i) blocks.push_back(local.A(i));
  return make_impedance(std::move(blocks), ImpedanceVariant::local_operator, 1.0, trace, nullptr);
}

Vector ImpedanceOperator::apply_local(int i, std::span<const Scalar> li) const { return M_[i].apply(li); }

Vector ImpedanceOperator::apply(std::span<const Scalar> lambda) const { return compound_.apply(lambda); }

Vector ImpedanceOperator::apply_inverse_local(int i, std::span<const Scalar> li) const {
  if (li.empty()) return {};
  return factors_[i]->solve(li);
}

Vector ImpedanceOperator::apply_inverse(std::span<const Scalar> lambda) const {
  if (lambda.size() != dimension()) throw DimensionError("impedance inverse: vector has the wrong length");
  Vector out(lambda.size());
  for (Index i = 0; i < M_.size(); ++i) {
    const Vector x = apply_inverse_local(static_cast<int>(i), block(lambda, offsets_, static_cast<int>(i)));
    std::copy(x.begin(), x.end(), out.begin() + static_cast<std::ptrdiff_t>(offsets_[i]));
  }
  return out;
}

WeightedInnerProduct ImpedanceOperator::inner_product(WeightedInnerProduct::Mode mode) const {
  if (mode == WeightedInnerProduct::Mode::euclidean) return WeightedInnerProduct::euclidean(dimension());
  return WeightedInnerProduct(compound_, mode);
}

double ImpedanceOperator::inverse_norm_squared(std::span<const Scalar> x) const {
  const Vector y = apply_inverse(x);
  double s = 0.0;
  for (Index k = 0; k < x.size(); ++k) s += (std::conj(x[k]) * y[k]).real();
  return s;
}

}  // namespace schwarzlab::traces
