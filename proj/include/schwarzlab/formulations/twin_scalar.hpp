#pragma once

#include <schwarzlab/formulations/instance.hpp>

namespace schwarzlab::formulations {

// One global dof shared by two scalar subdomains, A_i = [a_i], M_i = [m],
// swap exchange. Local loads f_1, f_2.
struct TwinScalarParams {
  double a1 = 1.0;
  double a2 = 1.0;
  double m = 1.0;
  Scalar alpha = 1.0;
  Scalar f1 = 1.0;
  Scalar f2 = 1.0;
};

Instance make_twin_scalar(const TwinScalarParams& p);

}  // namespace schwarzlab::formulations
