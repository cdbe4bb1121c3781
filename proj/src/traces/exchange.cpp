#include <schwarzlab/traces/exchange.hpp>

#include <algorithm>
#include <cmath>
#include <random>

namespace schwarzlab::traces {

std::string_view to_string(ExchangeVariant v) {
  switch (v) {
    case ExchangeVariant::swap:
      return "swap";
    case ExchangeVariant::multiplicity:
      return "multiplicity";
    case ExchangeVariant::weighted:
      return "weighted";
    case ExchangeVariant::glob_local:
      return "glob_local";
    case ExchangeVariant::global:
      return "global";
    case ExchangeVariant::exceptional:
      return "exceptional";
  }
  return "?";
}

ExchangeVariant parse_exchange_variant(std::string_view s) {
  if (s == "swap") return ExchangeVariant::swap;
  if (s == "multiplicity" || s == "multiplicity_reflection") return ExchangeVariant::multiplicity;
  if (s == "weighted" || s == "weighted_reflection") return ExchangeVariant::weighted;
  if (s == "glob_local" || s == "glob_local_M") return ExchangeVariant::glob_local;
  if (s == "global" || s == "global_M") return ExchangeVariant::global;
  if (s == "exceptional") return ExchangeVariant::exceptional;
  throw ValidationError("unknown exchange variant '" + std::string(s) +
                        "' (expected swap, multiplicity, weighted, glob_local, global or exceptional)");
}

ExchangeOperator::ExchangeOperator(ExchangeVariant variant, SparseMatrix x)
    : variant_(variant), dim_(x.rows()), matrix_(std::move(x)) {
  if (matrix_->cols() != dim_) throw DimensionError("exchange matrix must be square");
}

ExchangeOperator::ExchangeOperator(ExchangeVariant variant, Index dimension, std::function<Vector(const Vector&)> apply,
                                   std::function<Vector(const Vector&)> apply_transpose)
    : variant_(variant), dim_(dimension), apply_(std::move(apply)), apply_t_(std::move(apply_transpose)) {}

Vector ExchangeOperator::apply(std::span<const Scalar> lambda) const {
  if (lambda.size() != dim_) throw DimensionError("exchange apply: vector has the wrong length");
  if (matrix_) return matrix_->apply(lambda);
  return apply_(Vector(lambda.begin(), lambda.end()));
}

Vector ExchangeOperator::apply_transpose(std::span<const Scalar> lambda) const {
  if (lambda.size() != dim_) throw DimensionError("exchange transpose: vector has the wrong length");
  if (matrix_) return matrix_->apply_transpose(lambda);
  return apply_t_(Vector(lambda.begin(), lambda.end()));
}

DenseMatrix ExchangeOperator::dense() const {
  if (matrix_) return DenseMatrix::from_sparse(*matrix_);
  return DenseMatrix::from_operator(dim_, dim_, apply_);
}

namespace {

void require_globs(const facets::FacetSystem& system, ExchangeVariant v) {
  if (system.bilateral())
    throw ValidationError(std::string(to_string(v)) +
                          " exchange requires a glob system (reflections are defined on globs, not bilateral facets)");
}

// Dense block of M_i on the rows/cols of facet f.
DenseMatrix facet_block(const TraceOperator& trace, const ImpedanceOperator& m, int i, Index f,
                        const facets::Facet& facet) {
  const Index n = facet.dofs.size();
  const Index first = static_cast<Index>(trace.index(i, f, facet.dofs.front())) - trace.lambda_offsets()[i];
  DenseMatrix b(n, n);
  for (Index a = 0; a < n; ++a)
    for (Index c = 0; c < n; ++c) b(a, c) = m.M(i).at(first + a, first + c);
  return b;
}

SparseMatrix swap_matrix(const TraceOperator& trace, const facets::FacetSystem& system) {
  std::vector<Triplet> t;
  for (Index row = 0; row < trace.entries().size(); ++row) {
    const auto& e = trace.entries()[row];
    const auto& adj = system.facets[static_cast<Index>(e.facet)].adjacency;
    const int j = adj[0] == e.subdomain ? adj[1] : adj[0];
    const long col = trace.index(j, static_cast<Index>(e.facet), e.dof);
    if (col < 0) throw ValidationError("swap exchange: missing partner trace dof");
    t.push_back({row, static_cast<Index>(col), 1.0});
  }
  return SparseMatrix::from_triplets(trace.dimension(), trace.dimension(), t);
}

// (X l)_{iG} = 2 sum_j w_j l_{jG} / sum_j w_j - l_{iG}
SparseMatrix weighted_reflection(const TraceOperator& trace, const facets::FacetSystem& system,
                                 const std::vector<double>& w) {
  std::vector<Triplet> t;
  for (Index row = 0; row < trace.entries().size(); ++row) {
    const auto& e = trace.entries()[row];
    const auto& adj = system.facets[static_cast<Index>(e.facet)].adjacency;
    double total = 0.0;
    for (int j : adj) total += w[j];
    for (int j : adj) {
      const long col = trace.index(j, static_cast<Index>(e.facet), e.dof);
      double v = 2.0 * w[j] / total;
      if (j == e.subdomain) v -= 1.0;
      if (v != 0.0) t.push_back({row, static_cast<Index>(col), v});
    }
  }
  return SparseMatrix::from_triplets(trace.dimension(), trace.dimension(), t);
}

SparseMatrix glob_local_matrix(const TraceOperator& trace, const facets::FacetSystem& system,
                               const ImpedanceOperator& m) {
  if (!m.facet_block_diagonal())
    throw ValidationError("glob_local exchange requires an impedance that is block-diagonal with respect to the globs");
  std::vector<Triplet> t;
  for (Index f = 0; f < system.facets.size(); ++f) {
    const auto& G = system.facets[f];
    const Index n = G.dofs.size();
    std::vector<DenseMatrix> mj;
    DenseMatrix hat(n, n);
    for (int j : G.adjacency) {
      mj.push_back(facet_block(trace, m, j, f, G));
      hat = hat + mj.back();
    }
    const DenseFactorization fac = factorize(hat);
    for (Index s = 0; s < G.adjacency.size(); ++s) {
      const int j = G.adjacency[s];
      // C_j = hat^{-1} M_jG, column by column
      DenseMatrix c(n, n);
      for (Index col = 0; col < n; ++col) {
        Vector rhs(n);
        for (Index r = 0; r < n; ++r) rhs[r] = mj[s](r, col);
        const Vector x = fac.solve(rhs);
        for (Index r = 0; r < n; ++r) c(r, col) = x[r];
      }
      const Index col0 = static_cast<Index>(trace.index(j, f, G.dofs.front()));
      for (int i : G.adjacency) {
        const Index row0 = static_cast<Index>(trace.index(i, f, G.dofs.front()));
        for (Index r = 0; r < n; ++r)
          for (Index col = 0; col < n; ++col) {
            Scalar v = 2.0 * c(r, col);
            if (i == j && r == col) v -= 1.0;
            if (v != 0.0) t.push_back({row0 + r, col0 + col, Scalar(v.real(), 0.0)});
          }
      }
    }
  }
  return SparseMatrix::from_triplets(trace.dimension(), trace.dimension(), t);
}

// X = 2 R_L K^{-1} R_L^T M - I with K = R_L^T M R_L
SparseMatrix global_matrix(const TraceOperator& trace, const ImpedanceOperator& m,
                           const decomp::Multiplicities& mult) {
  const SparseMatrix rl = glob_incidence(trace, mult);
  const SparseMatrix b = multiply(rl.transpose(), m.compound());
  const SparseMatrix k = multiply(b, rl);
  DenseFactorization fac;
  try {
    fac = factorize(k);
  } catch (const SingularMatrixError&) {
    throw ValidationError("global exchange requires R_Lambda^T M R_Lambda to be nonsingular");
  }
  const Index n = trace.dimension();
  const SparseMatrix bt = b.transpose();
  std::vector<Index> glob_col(n);
  for (Index row = 0; row < n; ++row) glob_col[row] = rl.col_idx()[rl.row_ptr()[row]];
  std::vector<Triplet> t;
  Vector rhs(k.rows());
  for (Index c = 0; c < n; ++c) {
    std::fill(rhs.begin(), rhs.end(), Scalar(0.0));
    for (Index p = bt.row_ptr()[c]; p < bt.row_ptr()[c + 1]; ++p) rhs[bt.col_idx()[p]] = bt.values()[p];
    const Vector y = fac.solve(rhs);
    for (Index row = 0; row < n; ++row) {
      double v = 2.0 * y[glob_col[row]].real();
      if (row == c) v -= 1.0;
      if (v != 0.0) t.push_back({row, c, v});
    }
  }
  return SparseMatrix::from_triplets(n, n, t);
}

}  // namespace

ExchangeOperator build_exchange(const TraceOperator& trace, const facets::FacetSystem& system,
                                const ImpedanceOperator& impedance, const decomp::Multiplicities& mult,
                                const ExchangeParams& params) {
  if (trace.is_identity())
    throw ValidationError("the identity trace only supports the exceptional exchange (built from the global operator)");
  const ExchangeVariant v = params.variant;
  switch (v) {
    case ExchangeVariant::swap:
      if (!system.bilateral())
        throw ValidationError("swap exchange requires a bilateral facet system (every facet shared by exactly two subdomains)");
      return {v, swap_matrix(trace, system)};
    case ExchangeVariant::multiplicity:
      require_globs(system, v);
      return {v, weighted_reflection(trace, system, std::vector<double>(system.num_subdomains(), 1.0))};
    case ExchangeVariant::weighted: {
      require_globs(system, v);
      std::vector<double> w = params.weights;
      if (w.empty())
        for (int j = 0; j < system.num_subdomains(); ++j) w.push_back(1.0 + j);
      if (static_cast<int>(w.size()) != system.num_subdomains())
        throw ValidationError("weighted exchange: one weight per subdomain is required");
      for (double x : w)
        if (!(x > 0.0)) throw ValidationError("weighted exchange: weights must be positive (partition of unity)");
      return {v, weighted_reflection(trace, system, w)};
    }
    case ExchangeVariant::glob_local:
      require_globs(system, v);
      return {v, glob_local_matrix(trace, system, impedance)};
    case ExchangeVariant::global:
      require_globs(system, v);
      return {v, global_matrix(trace, impedance, mult)};
    case ExchangeVariant::exceptional:
      throw ValidationError("exceptional exchange requires the identity trace and M = A");
  }
  throw ValidationError("unknown exchange variant");
}

ExtensionOperator build_extension(const TraceOperator& trace) {
  if (!trace.has_right_inverse())
    throw ValidationError(
        "no extension with T E = I exists: the bilateral trace is not surjective when dofs are shared by more "
        "than two subdomains (use a glob system)");
  return ExtensionOperator(trace);
}

Vector random_vector(Index n, unsigned long long seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  Vector v(n);
  const double s = 1.0 / std::sqrt(2.0);
  for (auto& x : v) {
    const double re = nd(gen);
    const double im = nd(gen);
    x = Scalar(re * s, im * s);
  }
  return v;
}

namespace {

double m_norm(const ImpedanceOperator& m, std::span<const Scalar> v) {
  const Vector mv = m.apply(v);
  double s = 0.0;
  for (Index k = 0; k < v.size(); ++k) s += (std::conj(v[k]) * mv[k]).real();
  return std::sqrt(std::max(s, 0.0));
}

}  // namespace

ExchangeChecks check_exchange(const ExchangeOperator& x, const TraceOperator& trace, const ImpedanceOperator& m,
                              const decomp::Restriction& r, int probes, unsigned seed) {
  ExchangeChecks c;
  const double mscale = std::max(m.compound().max_abs(), 1e-300);
  if (x.has_matrix()) c.real_valued = x.matrix().is_real();
  for (int p = 0; p < probes; ++p) {
    const Vector v = random_vector(x.dimension(), seed + 2ull * p);
    const double nv = std::max(norm2(v), 1e-300);
    const Vector xv = x.apply(v);
    const Vector xxv = x.apply(xv);
    c.involution = std::max(c.involution, max_abs(sub(xxv, v)) / nv);

    // P = (I + X) / 2, P^2 v - P v
    Vector pv = scaled(add(v, xv), 0.5);
    const Vector ppv = scaled(add(pv, x.apply(pv)), 0.5);
    c.projection = std::max(c.projection, max_abs(sub(ppv, pv)) / nv);

    const Vector mxv = m.apply(xv);
    const Vector xtmxv = x.apply_transpose(mxv);
    c.m_invariance = std::max(c.m_invariance, max_abs(sub(xtmxv, m.apply(v))) / (mscale * nv));
    const double nm = std::max(m_norm(m, v), 1e-300);
    c.isometry = std::max(c.isometry, std::abs(m_norm(m, xv) - nm) / nm);

    const Vector vh = random_vector(r.global_size, seed + 2ull * p + 1);
    const Vector trv = trace.apply(r.restrict_all(vh));
    const double nt = std::max(norm2(trv), norm2(vh));
    const Vector d = sub(trv, x.apply(trv));
    c.conformity = std::max(c.conformity, nt > 0 ? max_abs(d) / nt : 0.0);

    if (!x.has_matrix()) {
      Vector re(x.dimension());
      for (Index k = 0; k < re.size(); ++k) re[k] = v[k].real();
      for (const auto& y : x.apply(re))
        if (y.imag() != 0.0) c.real_valued = false;
    }
  }
  return c;
}

bool satisfies_m_invariance(const ExchangeOperator& x, const ImpedanceOperator& m, double tol) {
  const double mscale = std::max(m.compound().max_abs(), 1e-300);
  for (int p = 0; p < 3; ++p) {
    const Vector v = random_vector(x.dimension(), 0x5eedull + p);
    const double nv = std::max(norm2(v), 1e-300);
    const Vector lhs = x.apply_transpose(m.apply(x.apply(v)));
    if (max_abs(sub(lhs, m.apply(v))) > tol * mscale * nv) return false;
  }
  return true;
}

}  // namespace schwarzlab::traces
