#include "helpers.hpp"

#include <schwarzlab/formulations/dual.hpp>
#include <schwarzlab/formulations/exceptional.hpp>
#include <schwarzlab/formulations/fetih.hpp>
#include <schwarzlab/formulations/twin_scalar.hpp>
#include <schwarzlab/linalg/spectral.hpp>

using namespace schwarzlab;
using namespace schwarzlab::formulations;
using facets::FacetVariant;
using traces::ExchangeVariant;

namespace {

Instance twin(double a, double m, Scalar alpha, Scalar f1 = 1.0, Scalar f2 = 1.0) {
  TwinScalarParams p;
  p.a1 = a;
  p.a2 = a;
  p.m = m;
  p.alpha = alpha;
  p.f1 = f1;
  p.f2 = f2;
  return make_twin_scalar(p);
}

// exact dual solution from a dense least-squares solve
Vector dual_solution(const DualSystem& d) { return least_squares(d.dense_operator(), d.rhs()); }

}  // namespace

TEST_SUITE("formulations") {
  TEST_CASE("twin augmented operators") {
    const auto c = twin(1.0, 1.0, 1.0);
    const DualSystem dc(c);
    CHECK(dc.augmented().matrix(0).at(0, 0) == Scalar(2.0));
    const auto w = twin(1.0, 1.0, kI);
    const DualSystem dw(w);
    CHECK(dw.augmented().matrix(0).at(0, 0) == Scalar(1.0, 1.0));
    CHECK(dw.alpha() == kI);
  }

  TEST_CASE("twin scattering operator") {
    const auto i1 = twin(1.0, 1.0, 1.0);
    const DualSystem d1(i1);
    const Vector l{Scalar(0.3, 1.0), Scalar(-2.0, 0.5)};
    CHECK(max_abs(d1.apply_S(l)) < 1e-15);
    const auto i2 = twin(1.0, 2.0, 1.0);
    const DualSystem d2(i2);
    const Vector s = d2.apply_S(l);
    CHECK(std::abs(s[0] - l[0] / 3.0) < 1e-15);
    CHECK(std::abs(s[1] - l[1] / 3.0) < 1e-15);
    CHECK(max_abs(d2.apply_S(Vector{0.0, 0.0})) == 0.0);
    CHECK(d2.simplified());
  }

  TEST_CASE("twin dual right-hand side and primal recovery") {
    const Scalar f1(2.0, 1.0), f2(-0.5, 3.0);
    const auto inst = twin(1.0, 1.0, 1.0, f1, f2);
    const DualSystem d(inst);
    CHECK(std::abs(d.rhs()[0] - f2) < 1e-15);
    CHECK(std::abs(d.rhs()[1] - f1) < 1e-15);
    const Vector u = d.primal(Vector{f2, f1});
    const Scalar uh = (f1 + f2) / 2.0;
    CHECK(std::abs(u[0] - uh) < 1e-15);
    CHECK(std::abs(u[1] - uh) < 1e-15);
    CHECK(testing::rel_diff(u, inst.reference) < 1e-15);
    const auto z = twin(1.0, 1.0, 1.0, 0.0, 0.0);
    const DualSystem dz(z);
    CHECK(max_abs(dz.rhs()) == 0.0);
    CHECK(max_abs(dz.primal(Vector{0.0, 0.0})) == 0.0);
  }

  TEST_CASE("twin pseudo-energy") {
    const auto inst = twin(1.0, 1.0, 1.0);
    const DualSystem d(inst);
    const Vector l{Scalar(1.0, 2.0), Scalar(-3.0, 0.0)};
    const auto e = d.pseudo_energy(l);
    CHECK(e.s_norm2 < 1e-30);
    CHECK(std::abs(4.0 * e.p - e.lambda_norm2) < 1e-13);
    CHECK(std::abs(e.p - (5.0 + 9.0) / 4.0) < 1e-13);
    const auto zero = d.pseudo_energy(Vector{0.0, 0.0});
    CHECK(zero.p == 0.0);
    CHECK(zero.s_norm2 == 0.0);
  }

  TEST_CASE("pseudo-energy identity on a Helmholtz instance") {
    const auto inst = build_instance(testing::grid_spec(meshfem::ProblemKind::helmholtz, 8, 2, FacetVariant::globs,
                                                        ExchangeVariant::multiplicity));
    const DualSystem d(inst);
    for (unsigned s = 0; s < 10; ++s) {
      const auto e = d.pseudo_energy(testing::random_complex(d.dimension(), s));
      CHECK(e.defect <= 1e-10 * e.lambda_norm2);
      CHECK(e.s_norm2 <= e.lambda_norm2 * (1.0 + 1e-12));
    }
  }

  TEST_CASE("dual solutions recover the global solution on all method variants") {
    const std::pair<FacetVariant, ExchangeVariant> pairs[] = {{FacetVariant::properly_closed, ExchangeVariant::swap},
                                                              {FacetVariant::bilateral_max, ExchangeVariant::swap},
                                                              {FacetVariant::non_redundant, ExchangeVariant::swap},
                                                              {FacetVariant::globs, ExchangeVariant::multiplicity},
                                                              {FacetVariant::globs, ExchangeVariant::global}};
    for (auto kind : {meshfem::ProblemKind::laplace, meshfem::ProblemKind::helmholtz})
      for (auto [fv, xv] : pairs) {
        CAPTURE(facets::to_string(fv));
        const auto inst = build_instance(testing::grid_spec(kind, 8, 2, fv, xv));
        const DualSystem d(inst);
        CHECK(testing::rel_diff(d.primal(dual_solution(d)), inst.reference) < 1e-10);
      }
  }

  TEST_CASE("kernel of the dual operator is the redundancy space") {
    for (auto fv : {FacetVariant::non_redundant, FacetVariant::properly_closed, FacetVariant::bilateral_max}) {
      const auto inst = build_instance(
          testing::grid_spec(meshfem::ProblemKind::helmholtz, 8, 2, fv, ExchangeVariant::swap));
      const DualSystem d(inst);
      CHECK(static_cast<long>(nullspace_dimension(d.dense_operator(), 1e-9)) == inst.admissibility.total_cycles);
    }
  }

  TEST_CASE("general form with side-unequal impedance") {
    auto spec = testing::grid_spec(meshfem::ProblemKind::laplace, 8, 2, FacetVariant::properly_closed,
                                   ExchangeVariant::swap);
    spec.side_scale = {1.0, 3.0, 0.5, 2.0};
    const auto inst = build_instance(spec);
    const DualSystem d(inst);
    CHECK_FALSE(d.simplified());
    CHECK(testing::rel_diff(d.primal(dual_solution(d)), inst.reference) < 1e-10);
  }

  TEST_CASE("singular augmented operator is an assumption failure") {
    std::vector<SparseMatrix> blocks{SparseMatrix(1, 1)};
    CHECK_THROWS_AS(AugmentedLocal(blocks, 1.0), AssumptionError);
  }

  TEST_CASE("parallel subdomain solves are bitwise identical") {
    const auto inst = build_instance(testing::grid_spec(meshfem::ProblemKind::helmholtz, 12, 3, FacetVariant::globs,
                                                        ExchangeVariant::multiplicity));
    const DualSystem seq(inst, false);
    const DualSystem par(inst, true);
    const Vector l = testing::random_complex(seq.dimension(), 9);
    CHECK(seq.apply(l) == par.apply(l));
    CHECK(seq.rhs() == par.rhs());
  }

  TEST_CASE("exceptional exchange") {
    const auto inst = twin(1.0, 1.0, 1.0);
    const auto x = exceptional_exchange(inst.problem, inst.dec);
    const DenseMatrix d = x.dense();
    CHECK(std::abs(d(0, 0)) < 1e-15);
    CHECK(std::abs(d(0, 1) - 1.0) < 1e-15);
    CHECK(std::abs(d(1, 0) - 1.0) < 1e-15);
    CHECK(std::abs(d(1, 1)) < 1e-15);

    auto spec = testing::grid_spec(meshfem::ProblemKind::reaction_diffusion, 8, 2, FacetVariant::globs,
                                   ExchangeVariant::exceptional);
    const auto big = build_instance(spec);
    const Vector l = testing::random_complex(big.exchange.dimension(), 4);
    CHECK(testing::rel_diff(big.exchange.apply(big.exchange.apply(l)), l) < 1e-12);
    CHECK(traces::satisfies_m_invariance(big.exchange, big.impedance));

    spec.problem.kind = meshfem::ProblemKind::helmholtz;
    CHECK_THROWS_AS(build_instance(spec), ValidationError);

    // centre subdomain of a 3x3 laplace split is floating
    auto floating = testing::grid_spec(meshfem::ProblemKind::laplace, 12, 3, FacetVariant::globs,
                                       ExchangeVariant::exceptional);
    CHECK_THROWS_AS(build_instance(floating), ValidationError);
  }

  TEST_CASE("FETI-H on two subdomains") {
    auto spec = testing::grid_spec(meshfem::ProblemKind::laplace, 8, 1, FacetVariant::non_redundant,
                                   ExchangeVariant::swap);
    spec.px = 2;
    const auto inst = build_instance(spec);
    const auto h = fetih_build(inst);
    CHECK(h.sign == std::vector<int>{1, -1});
    CHECK(h.tree_facets.size() == 1);
    Vector f;
    for (const auto& fi : inst.dec.local.f) f.insert(f.end(), fi.begin(), fi.end());
    const auto sol = fetih_solve(h, f, 1e-12, 200);
    CHECK(sol.gmres.converged);
    CHECK(testing::rel_diff(sol.u, inst.reference) < 1e-8);
    const Vector zero(f.size(), 0.0);
    CHECK(max_abs(fetih_solve(h, zero, 1e-12, 200).u) == 0.0);
  }

  TEST_CASE("FETI-H on 2x2 subdomains") {
    auto spec = testing::grid_spec(meshfem::ProblemKind::helmholtz, 16, 2, FacetVariant::non_redundant,
                                   ExchangeVariant::swap);
    spec.boundary = meshfem::BoundarySpec::all(meshfem::BoundaryKind::dirichlet);
    const auto inst = build_instance(spec);
    const auto h = fetih_build(inst);
    REQUIRE(h.tree_facets.size() == 3);
    std::vector<int> touched(4, 0);
    for (Index f : h.tree_facets) {
      const auto& adj = inst.system.facets[f].adjacency;
      CHECK(h.sign[adj[0]] == -h.sign[adj[1]]);
      touched[adj[0]] = touched[adj[1]] = 1;
    }
    CHECK(std::count(touched.begin(), touched.end(), 1) == 4);
    const auto& p = inst.problem;
    const SparseMatrix sum = decomp::assemble_global(inst.dec.restriction, h.augmented.blocks());
    CHECK(add(sum, meshfem::combine(p.A0, p.A1, p.A2, p.wave), 1.0, -1.0).max_abs() == 0.0);
    Vector f;
    for (const auto& fi : inst.dec.local.f) f.insert(f.end(), fi.begin(), fi.end());
    const auto sol = fetih_solve(h, f, 1e-12, 500);
    CHECK(testing::rel_diff(sol.u, inst.reference) < 1e-8);
  }

  TEST_CASE("FETI-H rejects lossy wave problems") {
    const auto inst = build_instance(testing::grid_spec(meshfem::ProblemKind::helmholtz, 8, 2,
                                                        FacetVariant::non_redundant, ExchangeVariant::swap));
    CHECK_THROWS_AS(fetih_build(inst), ValidationError);
  }
}
