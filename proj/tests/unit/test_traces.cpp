#include "helpers.hpp"

#include <schwarzlab/formulations/twin_scalar.hpp>
#include <schwarzlab/linalg/spectral.hpp>

using namespace schwarzlab;
using facets::FacetVariant;
using traces::ExchangeVariant;
using traces::ImpedanceVariant;

namespace {

long center_dof(const formulations::Instance& inst) {
  return inst.problem.node_dof[inst.mesh.node(inst.mesh.nx / 2, inst.mesh.ny / 2)];
}

std::vector<Index> entries_of(const formulations::Instance& inst, Index dof) {
  std::vector<Index> out;
  const auto& e = inst.trace.entries();
  for (Index t = 0; t < e.size(); ++t)
    if (e[t].dof == dof) out.push_back(t);
  return out;
}

}  // namespace

TEST_SUITE("traces") {
  TEST_CASE("twin scalar trace and impedance") {
    formulations::TwinScalarParams p;
    p.m = 2.5;
    const auto inst = formulations::make_twin_scalar(p);
    CHECK(inst.trace.dimension() == 2);
    CHECK(inst.trace.T(0).at(0, 0) == Scalar(1.0));
    CHECK(inst.trace.T(1).at(0, 0) == Scalar(1.0));
    CHECK(inst.impedance.compound().at(0, 0) == Scalar(2.5));
    CHECK(inst.impedance.compound().at(1, 1) == Scalar(2.5));
    CHECK(inst.exchange.apply(Vector{1.0, 2.0}) == Vector{2.0, 1.0});
    CHECK(inst.trace.has_right_inverse());
  }

  TEST_CASE("cross dof multipliers per layout") {
    const auto pc = testing::laplace(8, 2, FacetVariant::properly_closed, ExchangeVariant::swap);
    CHECK(entries_of(pc, center_dof(pc)).size() == 8);
    CHECK_FALSE(pc.trace.has_right_inverse());
    const auto gl = testing::laplace(8, 2, FacetVariant::globs, ExchangeVariant::multiplicity);
    CHECK(entries_of(gl, center_dof(gl)).size() == 4);
    CHECK(gl.trace.has_right_inverse());
  }

  TEST_CASE("scalar impedance is sigma times identity") {
    auto spec = testing::grid_spec(meshfem::ProblemKind::helmholtz, 8, 2, FacetVariant::globs,
                                   ExchangeVariant::multiplicity);
    const auto inst = formulations::build_instance(spec);
    CHECK(inst.sigma == doctest::Approx(6.283185307179586));
    const auto d = DenseMatrix::from_sparse(inst.impedance.compound());
    const auto id = DenseMatrix::identity(d.rows());
    // entries are rounded to the impedance quantum 2^-44 relative to sigma
    const Scalar diag = d(0, 0);
    CHECK(std::abs(diag - inst.sigma) <= std::ldexp(inst.sigma, -44));
    for (Index i = 0; i < d.rows(); ++i)
      for (Index j = 0; j < d.cols(); ++j) CHECK(d(i, j) == diag * id(i, j));
  }

  TEST_CASE("multiplicity reflection on the vertex and edge globs") {
    const auto inst = testing::laplace(8, 2, FacetVariant::globs, ExchangeVariant::multiplicity);
    const Vector l = testing::random_complex(inst.trace.dimension(), 7);
    const Vector xl = inst.exchange.apply(l);
    const auto at_center = entries_of(inst, center_dof(inst));
    REQUIRE(at_center.size() == 4);
    Scalar sum = 0.0;
    for (Index t : at_center) sum += l[t];
    for (Index t : at_center) CHECK(std::abs(xl[t] - (-0.5 * l[t] + 0.5 * (sum - l[t]))) < 1e-14);
    // an edge glob dof: plain swap
    const Index edge_dof = inst.dec.mult.interface_dofs.front();
    const auto pair = entries_of(inst, edge_dof);
    REQUIRE(pair.size() == 2);
    CHECK(std::abs(xl[pair[0]] - l[pair[1]]) < 1e-15);
    CHECK(std::abs(xl[pair[1]] - l[pair[0]]) < 1e-15);
  }

  TEST_CASE("swap exchange pairs the two sides of each facet") {
    const auto inst = testing::laplace(8, 2, FacetVariant::bilateral_max, ExchangeVariant::swap);
    const auto& e = inst.trace.entries();
    const Vector l = testing::random_complex(inst.trace.dimension(), 3);
    const Vector xl = inst.exchange.apply(l);
    for (Index t = 0; t < e.size(); ++t) {
      const auto& f = inst.system.facets[e[t].facet];
      const int other = f.adjacency[0] == e[t].subdomain ? f.adjacency[1] : f.adjacency[0];
      CHECK(xl[t] == l[inst.trace.index(other, e[t].facet, e[t].dof)]);
    }
  }

  TEST_CASE("exchange assumptions hold for every valid pairing") {
    const std::pair<FacetVariant, ExchangeVariant> pairs[] = {
        {FacetVariant::bilateral_max, ExchangeVariant::swap},   {FacetVariant::properly_closed, ExchangeVariant::swap},
        {FacetVariant::non_redundant, ExchangeVariant::swap},   {FacetVariant::globs, ExchangeVariant::multiplicity},
        {FacetVariant::globs, ExchangeVariant::weighted},       {FacetVariant::globs, ExchangeVariant::glob_local},
        {FacetVariant::globs, ExchangeVariant::global}};
    for (auto [fv, xv] : pairs) {
      CAPTURE(facets::to_string(fv));
      CAPTURE(traces::to_string(xv));
      const auto inst = testing::laplace(6, 2, fv, xv);
      const auto c = traces::check_exchange(inst.exchange, inst.trace, inst.impedance, inst.dec.restriction, 10, 5);
      CHECK(c.involution <= 1e-12);
      CHECK(c.conformity <= 1e-12);
      CHECK(c.projection <= 1e-12);
      if (xv != ExchangeVariant::weighted) CHECK(c.m_invariance <= 1e-10);
    }
  }

  TEST_CASE("swap on globs and reflections on bilateral systems are rejected") {
    CHECK_THROWS_AS(testing::laplace(6, 2, FacetVariant::globs, ExchangeVariant::swap), ValidationError);
    CHECK_THROWS_AS(testing::laplace(6, 2, FacetVariant::properly_closed, ExchangeVariant::multiplicity),
                    ValidationError);
    try {
      testing::laplace(6, 2, FacetVariant::globs, ExchangeVariant::swap);
    } catch (const ValidationError& e) {
      CHECK(std::string(e.what()).find("bilateral") != std::string::npos);
    }
  }

  TEST_CASE("extension exists only with a right inverse") {
    const auto gl = testing::laplace(6, 2, FacetVariant::globs, ExchangeVariant::multiplicity);
    const auto e = traces::build_extension(gl.trace);
    const Vector l = testing::random_complex(gl.trace.dimension(), 1);
    CHECK(testing::rel_diff(gl.trace.apply(e.apply(l)), l) < 1e-15);
    const auto pc = testing::laplace(6, 2, FacetVariant::properly_closed, ExchangeVariant::swap);
    CHECK_THROWS_AS(traces::build_extension(pc.trace), ValidationError);
  }

  TEST_CASE("every impedance variant is symmetric positive definite") {
    for (auto iv : {ImpedanceVariant::scalar, ImpedanceVariant::facet_lumped_mass, ImpedanceVariant::glob_block,
                    ImpedanceVariant::diagonal, ImpedanceVariant::interface_mass}) {
      CAPTURE(traces::to_string(iv));
      auto spec = testing::grid_spec(meshfem::ProblemKind::helmholtz, 8, 2, FacetVariant::globs,
                                     ExchangeVariant::multiplicity);
      spec.impedance = iv;
      const auto inst = formulations::build_instance(spec);
      const auto& m = inst.impedance.compound();
      CHECK(m.is_symmetric());
      CHECK(m.is_real());
      const auto ev = hermitian_eigenvalues(DenseMatrix::from_sparse(m));
      CHECK(ev.front() > 0.0);
    }
  }

  TEST_CASE("glob_local needs a facet block diagonal impedance") {
    auto spec = testing::grid_spec(meshfem::ProblemKind::helmholtz, 8, 2, FacetVariant::globs,
                                   ExchangeVariant::glob_local);
    spec.impedance = ImpedanceVariant::interface_mass;
    spec.exchange.variant = ExchangeVariant::multiplicity;
    const bool block_diag = formulations::build_instance(spec).impedance.facet_block_diagonal();
    spec.exchange.variant = ExchangeVariant::glob_local;
    if (block_diag) CHECK_NOTHROW(formulations::build_instance(spec));
    else CHECK_THROWS_AS(formulations::build_instance(spec), ValidationError);
  }

  TEST_CASE("side scaling breaks the isometry of swap") {
    auto spec = testing::grid_spec(meshfem::ProblemKind::laplace, 6, 2, FacetVariant::properly_closed,
                                   ExchangeVariant::swap);
    spec.side_scale = {1.0, 2.0, 1.0, 1.0};
    const auto inst = formulations::build_instance(spec);
    CHECK_FALSE(traces::satisfies_m_invariance(inst.exchange, inst.impedance));
    CHECK_FALSE(inst.impedance.side_equal());
  }
}
