#include <schwarzlab/formulations/exceptional.hpp>

#include <memory>

namespace schwarzlab::formulations {

traces::ExchangeOperator exceptional_exchange(const meshfem::GlobalProblem& problem, const decomp::Decomposition& dec) {
  if (problem.wave)
    throw ValidationError(
        "exceptional exchange requires the coercive setting (alpha = 1, A symmetric and invertible); "
        "the wave problem is rejected");
  struct Data {
    decomp::Restriction r;
    std::vector<SparseMatrix> a;
    DenseFactorization hat;
    Index dim = 0;
  };
  auto data = std::make_shared<Data>();
  data->r = dec.restriction;
  for (int i = 0; i < dec.num_subdomains(); ++i) {
    data->a.push_back(dec.local.A(i));
    if (!data->a.back().is_symmetric()) throw ValidationError("exceptional exchange requires symmetric A_i");
    try {
      (void)factorize(data->a.back());
    } catch (const SingularMatrixError&) {
      throw ValidationError("exceptional exchange requires positive definite A_i; subdomain " + std::to_string(i) +
                            " is floating (M_i = A_i is singular)");
    }
  }
  try {
    data->hat = factorize(problem.combined());
  } catch (const SingularMatrixError&) {
    throw ValidationError("exceptional exchange requires an invertible global operator");
  }
  const auto off = data->r.offsets();
  data->dim = off.back();

  auto block_apply = [data, off](const Vector& v) {
    Vector out(v.size());
    for (int i = 0; i < data->r.num_subdomains(); ++i) {
      const Vector y = data->a[i].apply(std::span<const Scalar>(v).subspan(off[i], off[i + 1] - off[i]));
      std::copy(y.begin(), y.end(), out.begin() + static_cast<std::ptrdiff_t>(off[i]));
    }
    return out;
  };
  // X l = 2 R A-hat^{-1} R^T A l - l
  auto apply = [data, block_apply](const Vector& l) {
    const Vector g = data->r.assemble_all(block_apply(l));
    Vector out = data->r.restrict_all(data->hat.solve(g));
    for (Index k = 0; k < out.size(); ++k) out[k] = 2.0 * out[k] - l[k];
    return out;
  };
  // X^T l = 2 A R A-hat^{-1} R^T l - l  (A and A-hat symmetric)
  auto apply_t = [data, block_apply](const Vector& l) {
    const Vector g = data->r.assemble_all(l);
    Vector out = block_apply(data->r.restrict_all(data->hat.solve(g)));
    for (Index k = 0; k < out.size(); ++k) out[k] = 2.0 * out[k] - l[k];
    return out;
  };
  return {traces::ExchangeVariant::exceptional, data->dim, apply, apply_t};
}

}  // namespace schwarzlab::formulations
