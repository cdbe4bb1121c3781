#include <schwarzlab/formulations/twin_scalar.hpp>

namespace schwarzlab::formulations {

Instance make_twin_scalar(const TwinScalarParams& p) {
  const bool wave = p.alpha == kI;
  if (!wave && p.alpha != Scalar(1.0)) throw ValidationError("twin scalar: alpha must be 1 or i");
  auto one = [](double v) {
    const Triplet t{0, 0, v};
    return SparseMatrix::from_triplets(1, 1, std::span<const Triplet>(&t, 1));
  };
  Instance inst;
  inst.problem = meshfem::make_problem(one(p.a1 + p.a2), SparseMatrix(1, 1), SparseMatrix(1, 1), {p.f1 + p.f2}, wave);
  std::vector<meshfem::OperatorParts> parts(2);
  parts[0] = {one(p.a1), SparseMatrix(1, 1), SparseMatrix(1, 1), {p.f1}};
  parts[1] = {one(p.a2), SparseMatrix(1, 1), SparseMatrix(1, 1), {p.f2}};
  inst.dec = decomp::make_decomposition(1, {{0}, {0}}, std::move(parts), wave);
  inst.partition.num_subdomains = 2;
  traces::ExchangeParams xp;
  xp.variant = traces::ExchangeVariant::swap;
  finish_instance(inst, facets::FacetVariant::bilateral_max, xp, p.m);
  return inst;
}

}  // namespace schwarzlab::formulations
