#include "helpers.hpp"

using namespace schwarzlab;
using meshfem::BoundaryKind;
using meshfem::BoundarySpec;

namespace {

Index count_tag(const meshfem::StructuredMesh& m, meshfem::NodeTag t) {
  return static_cast<Index>(std::count(m.tags.begin(), m.tags.end(), t));
}

}  // namespace

TEST_SUITE("meshfem") {
  TEST_CASE("mesh counts") {
    const auto m1 = meshfem::build_mesh(1, 1, BoundarySpec::all(BoundaryKind::robin));
    CHECK(m1.num_nodes() == 4);
    CHECK(m1.num_elements() == 2);
    CHECK(count_tag(m1, meshfem::NodeTag::robin) == 4);
    const auto m2 = meshfem::build_mesh(2, 2, BoundarySpec::all(BoundaryKind::dirichlet));
    CHECK(m2.num_nodes() == 9);
    CHECK(m2.num_elements() == 8);
    CHECK(count_tag(m2, meshfem::NodeTag::interior) == 1);
    const auto m3 = meshfem::build_mesh(4, 2, BoundarySpec::all(BoundaryKind::robin));
    CHECK(m3.num_nodes() == 15);
    CHECK(m3.num_elements() == 16);
  }

  TEST_CASE("triangles are positively oriented") {
    const auto m = meshfem::build_mesh(5, 3, BoundarySpec::all(BoundaryKind::robin));
    for (Index e = 0; e < m.num_elements(); ++e) CHECK(meshfem::signed_area(m, e) > 0.0);
  }

  TEST_CASE("single interior node Laplacian") {
    meshfem::ProblemParams p;
    p.kind = meshfem::ProblemKind::laplace;
    const auto prob = meshfem::assemble(meshfem::build_mesh(2, 2, BoundarySpec::all(BoundaryKind::dirichlet)), p);
    REQUIRE(prob.size() == 1);
    CHECK(prob.A0.at(0, 0) == Scalar(4.0));
    CHECK(prob.A1.max_abs() == 0.0);
    CHECK(prob.A2.max_abs() == 0.0);
    CHECK_FALSE(prob.wave);
  }

  TEST_CASE("consistent mass of the unit square") {
    meshfem::ProblemParams p;
    p.kind = meshfem::ProblemKind::helmholtz;
    p.kappa = 1.0;
    p.eta = 1.0;
    const auto prob = meshfem::assemble(meshfem::build_mesh(1, 1, BoundarySpec::all(BoundaryKind::robin)), p);
    REQUIRE(prob.size() == 4);
    Scalar trace = 0.0, total = 0.0;
    for (Index i = 0; i < 4; ++i) {
      trace += prob.A2.at(i, i);
      for (Index j = 0; j < 4; ++j) total += prob.A2.at(i, j);
    }
    // each triangle contributes area/6 per diagonal entry
    CHECK(std::abs(trace - 0.5) < 1e-12);
    CHECK(std::abs(total - 1.0) < 1e-12);
    CHECK(prob.wave);
    CHECK(prob.alpha == kI);
  }

  TEST_CASE("stiffness rows sum to zero without Dirichlet nodes") {
    meshfem::ProblemParams p;
    p.kind = meshfem::ProblemKind::helmholtz;
    p.kappa = 2.0;
    const auto prob = meshfem::assemble(meshfem::build_mesh(6, 4, BoundarySpec::all(BoundaryKind::neumann)), p);
    const Vector ones(prob.size(), 1.0);
    CHECK(max_abs(prob.A0.apply(ones)) < 1e-12);
    CHECK(prob.A0.is_symmetric());
    CHECK(prob.A2.is_symmetric());
  }

  TEST_CASE("laplace forces kappa to zero") {
    meshfem::ProblemParams p;
    p.kind = meshfem::ProblemKind::laplace;
    p.kappa = 5.0;
    const auto prob = meshfem::assemble(meshfem::build_mesh(4, 4, BoundarySpec::all(BoundaryKind::dirichlet)), p);
    CHECK(prob.A2.max_abs() == 0.0);
  }

  TEST_CASE("volumetric loss enters A1") {
    meshfem::ProblemParams p;
    p.kind = meshfem::ProblemKind::helmholtz;
    p.kappa = 3.0;
    p.loss = 2.0;
    const auto prob = meshfem::assemble(meshfem::build_mesh(3, 3, BoundarySpec::all(BoundaryKind::dirichlet)), p);
    CHECK(prob.A1.max_abs() > 0.0);
  }

  TEST_CASE("direct solve satisfies the system") {
    meshfem::ProblemParams p;
    p.kind = meshfem::ProblemKind::helmholtz;
    p.kappa = 6.283185307179586;
    const auto prob = meshfem::assemble(meshfem::build_mesh(16, 16, meshfem::default_boundary(p.kind)), p);
    const Vector u = meshfem::direct_solve(prob);
    CHECK(testing::rel_diff(prob.combined().apply(u), prob.f) < 1e-10);
  }
}
