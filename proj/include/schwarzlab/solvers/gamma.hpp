#pragma once

#include <schwarzlab/formulations/instance.hpp>
#include <schwarzlab/formulations/dual.hpp>

namespace schwarzlab::solvers {

// Smallest singular value of M^{-1/2} (I - X^T S) M^{1/2} on the
// M^{-1}-orthogonal complement of the redundancy space.
double estimate_gamma(const formulations::DualSystem& dual, const std::vector<Vector>& redundancy = {});

// rho = sqrt(1 - (1 - beta) beta gamma^2)
double richardson_bound(double beta, double gamma);
// sqrt(1 - gamma^2 / 4)
double gmres_bound(double gamma);

// Measured constants of the explicit lower bound for gamma.
struct GammaBound {
  double C_R = 0.0;
  double C_A = 0.0;
  double C_T = 0.0;
  double C_E = 0.0;
  double c_hat = 0.0;
  double gamma_formula = 0.0;  // 2 / ((C_A C_E + C_T)^2 C_R^2 / c + C_A C_E^2 + 1)
  double gamma_simple = 0.0;   // c / ((C_A C_E + C_T)^2 C_R^2)
};

GammaBound gamma_lower_bound(const formulations::Instance& inst);

// min over probes of Re<M^{-1} (I - X^T S) l, conj(l)> / ||l||^2_{M^{-1}}
double coercivity_ratio(const formulations::DualSystem& dual, int probes, unsigned long long seed);

// dim ker(I - X^T S) from the dense SVD
Index dual_kernel_dimension(const formulations::DualSystem& dual, double rel_tol = 1e-9);

}  // namespace schwarzlab::solvers
