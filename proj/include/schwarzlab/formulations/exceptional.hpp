#pragma once

#include <schwarzlab/traces/exchange.hpp>

namespace schwarzlab::formulations {

// X = 2 R A-hat^{-1} R^T A - I on the identity trace with M = A. Coercive
// problems only.
traces::ExchangeOperator exceptional_exchange(const meshfem::GlobalProblem& problem, const decomp::Decomposition& dec);

}  // namespace schwarzlab::formulations
