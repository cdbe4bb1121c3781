#pragma once

#include <schwarzlab/formulations/dual.hpp>
#include <schwarzlab/linalg/gmres.hpp>

#include <optional>

namespace schwarzlab::solvers {

enum class NormMode { M_inverse, euclidean };

std::string_view to_string(NormMode m);
NormMode parse_norm_mode(std::string_view s);

struct IterationConfig {
  double beta = 0.5;
  double tol = 1e-10;
  Index maxit = 1000;
  unsigned long long seed = 1;
  NormMode norm = NormMode::M_inverse;
  // lambda^(0) = 0 instead of a seeded random vector
  bool zero_init = false;
  // consecutive non-decreasing errors that count as divergence
  Index divergence_window = 50;
  // evaluate the energy-decay identity every step (needs the reference lambda)
  bool log_energy = false;
  // keep every primal iterate (for equivalence checks)
  bool keep_iterates = false;
  // record wall time per iteration
  bool timing = false;
};

void validate(const IterationConfig& cfg);

// Reference data for error histories.
struct Reference {
  Vector u;                      // R u-hat, stacked
  std::optional<Vector> lambda;  // Z-deflated solution of the dual system
  std::vector<Vector> redundancy;  // basis of Z (may be empty)
};

struct IterationRecord {
  Index iteration = 0;
  double residual = 0.0;       // relative dual residual
  double error = -1.0;         // ||lambda - lambda_ref||, -1 if unavailable
  double primal_error = -1.0;  // ||u - R u-hat|| / ||R u-hat||
  double p = -1.0;             // pseudo-energy of the error, -1 if not logged
  double energy_defect = -1.0; // relative defect of the energy-decay identity
  double wall_time = 0.0;
};

struct ConvergenceReport {
  std::string method;
  std::vector<IterationRecord> history;
  Index iterations = 0;
  bool converged = false;
  bool diverged = false;
  bool breakdown = false;
  Index breakdown_iteration = 0;
  double final_residual = 0.0;
  double final_primal_error = -1.0;
  double rho_obs = -1.0;
  double max_energy_defect = 0.0;
  double beta = 1.0;
  unsigned long long seed = 0;
  Vector lambda;
  Vector u;
  std::vector<Vector> iterates;
};

// lambda^(0) per config
Vector initial_lambda(Index n, const IterationConfig& cfg);

// Dense solve of (I - X^T S) l = d with the Z component removed in the
// M^{-1} metric. Dimension limit 2000.
Vector deflated_reference(const formulations::DualSystem& dual, const std::vector<Vector>& redundancy);
// Removes the Z component of v (M^{-1}-orthogonal projection).
Vector deflate(const formulations::DualSystem& dual, const std::vector<Vector>& redundancy, std::span<const Scalar> v);

Reference make_reference(const formulations::DualSystem& dual, const Vector& u_reference,
                         const std::vector<Vector>& redundancy, bool with_lambda);

ConvergenceReport richardson(const formulations::DualSystem& dual, const IterationConfig& cfg, const Reference* ref);

// Primal recurrence with E = T^T; u^(0) = A~^{-1} (f + T^T lambda^(0)).
ConvergenceReport primal_iterate(const formulations::DualSystem& dual, const IterationConfig& cfg,
                                 const Reference* ref);

ConvergenceReport gmres_dual(const formulations::DualSystem& dual, const IterationConfig& cfg, const Reference* ref);

// Geometric mean of the last 10 quotients of `history` (needs >= 12
// entries); 0 when the tail contains an exact zero.
double fit_rate(std::span<const double> history);

// Divergence: `window` consecutive non-decreasing entries at the end.
bool is_diverging(std::span<const double> history, Index window);

}  // namespace schwarzlab::solvers
