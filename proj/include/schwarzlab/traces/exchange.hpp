#pragma once

#include <schwarzlab/linalg/dense.hpp>
#include <schwarzlab/traces/impedance.hpp>

#include <functional>
#include <optional>

namespace schwarzlab::traces {

enum class ExchangeVariant { swap, multiplicity, weighted, glob_local, global, exceptional };

std::string_view to_string(ExchangeVariant v);
ExchangeVariant parse_exchange_variant(std::string_view s);

// Involution X on Lambda, held as a sparse matrix or (exceptional variant) as
// an operator pair for X and X^T.
class ExchangeOperator {
 public:
  ExchangeOperator() = default;
  ExchangeOperator(ExchangeVariant variant, SparseMatrix x);
  ExchangeOperator(ExchangeVariant variant, Index dimension, std::function<Vector(const Vector&)> apply,
                   std::function<Vector(const Vector&)> apply_transpose);

  ExchangeVariant variant() const { return variant_; }
  Index dimension() const { return dim_; }
  bool has_matrix() const { return matrix_.has_value(); }
  const SparseMatrix& matrix() const { return *matrix_; }

  Vector apply(std::span<const Scalar> lambda) const;
  Vector apply_transpose(std::span<const Scalar> lambda) const;
  DenseMatrix dense() const;

 private:
  ExchangeVariant variant_ = ExchangeVariant::swap;
  Index dim_ = 0;
  std::optional<SparseMatrix> matrix_;
  std::function<Vector(const Vector&)> apply_;
  std::function<Vector(const Vector&)> apply_t_;
};

struct ExchangeParams {
  ExchangeVariant variant = ExchangeVariant::swap;
  // per-subdomain weights w_j of the weighted reflection; empty means w_j = 1 + j
  std::vector<double> weights;
};

ExchangeOperator build_exchange(const TraceOperator& trace, const facets::FacetSystem& system,
                                const ImpedanceOperator& impedance, const decomp::Multiplicities& mult,
                                const ExchangeParams& params);

// Extension E : Lambda -> U with T E = I, realized as E = T^T.
class ExtensionOperator {
 public:
  explicit ExtensionOperator(const TraceOperator& trace) : trace_(&trace) {}
  Vector apply(std::span<const Scalar> lambda) const { return trace_->apply_transpose(lambda); }
  Vector apply_transpose(std::span<const Scalar> u) const { return trace_->apply(u); }

 private:
  const TraceOperator* trace_;
};

ExtensionOperator build_extension(const TraceOperator& trace);

// Numerical checks of the exchange assumptions.
struct ExchangeChecks {
  double involution = 0.0;      // max |X X v - v| / |v| over probes
  double conformity = 0.0;      // max |(I - X) T R v| / |v|
  double projection = 0.0;      // idempotence defect of (I + X)/2
  double m_invariance = 0.0;    // |X^T M X v - M v| / (|M| |v|)
  double isometry = 0.0;        // | ||X v||_M - ||v||_M | / ||v||_M
  bool real_valued = true;
};

ExchangeChecks check_exchange(const ExchangeOperator& x, const TraceOperator& trace, const ImpedanceOperator& m,
                              const decomp::Restriction& r, int probes, unsigned seed);

// X^T M X = M to tol on random probes.
bool satisfies_m_invariance(const ExchangeOperator& x, const ImpedanceOperator& m, double tol = 1e-10);

// Complex standard normal entries from a seeded generator.
Vector random_vector(Index n, unsigned long long seed);

}  // namespace schwarzlab::traces
