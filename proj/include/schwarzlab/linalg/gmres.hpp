#pragma once

#include <schwarzlab/linalg/inner_product.hpp>

#include <functional>
#include <optional>

namespace schwarzlab {

using LinearOperator = std::function<Vector(const Vector&)>;

struct GmresResult {
  Vector x;
  // Relative weighted residual estimates; entry 0 is the initial residual.
  std::vector<double> residuals;
  Index iterations = 0;
  bool converged = false;
  // Zero Arnoldi vector; the Krylov space became invariant at this iteration.
  bool breakdown = false;
  Index breakdown_iteration = 0;
  // ||b - A x||_W / ||b||_W recomputed at exit.
  double true_residual = 0.0;
};

// Full (unrestarted) GMRES; Arnoldi with modified Gram-Schmidt and one
// reorthogonalization pass, all inner products taken in `ip`.
GmresResult gmres(const LinearOperator& apply, std::span<const Scalar> b, const WeightedInnerProduct& ip,
                  double tol, Index maxit, std::optional<Vector> x0 = std::nullopt);

}  // namespace schwarzlab
