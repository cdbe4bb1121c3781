#include "helpers.hpp"

#include <schwarzlab/formulations/twin_scalar.hpp>

using namespace schwarzlab;
using meshfem::BoundaryKind;
using meshfem::BoundarySpec;

namespace {

struct Setup {
  meshfem::StructuredMesh mesh;
  meshfem::GlobalProblem problem;
  decomp::Partition part;
  decomp::Decomposition dec;
};

Setup setup(Index nx, Index ny, Index px, Index py, meshfem::ProblemKind kind = meshfem::ProblemKind::laplace) {
  Setup s;
  meshfem::ProblemParams p;
  p.kind = kind;
  p.kappa = 3.0;
  s.mesh = meshfem::build_mesh(nx, ny, meshfem::default_boundary(kind));
  s.problem = meshfem::assemble(s.mesh, p);
  s.part = decomp::partition_grid(s.mesh, px, py);
  s.dec = decomp::build_restrictions(s.mesh, s.part, s.problem);
  return s;
}

}  // namespace

TEST_SUITE("decomp") {
  TEST_CASE("partition counts") {
    const auto m = meshfem::build_mesh(4, 4, BoundarySpec::all(BoundaryKind::robin));
    const auto p = decomp::partition_grid(m, 2, 2);
    CHECK(p.num_subdomains == 4);
    for (const auto& e : p.elements) CHECK(e.size() == 8);
    CHECK_THROWS_AS(decomp::partition_grid(m, 3, 1), ValidationError);
  }

  TEST_CASE("single subdomain") {
    const auto s = setup(4, 4, 1, 1);
    CHECK(s.dec.mult.mu_max == 1);
    CHECK(s.dec.mult.interface_dofs.empty());
    CHECK(decomp::check_assembling(s.dec.restriction, s.dec.local, s.problem).exact);
    for (char b : s.dec.local.bubble[0]) CHECK(b);
  }

  TEST_CASE("two subdomains share one dof line") {
    const auto s = setup(4, 2, 2, 1, meshfem::ProblemKind::helmholtz);
    CHECK(s.dec.mult.mu_max == 2);
    CHECK(s.dec.mult.interface_dofs.size() == 3);
    for (int i = 0; i < 2; ++i)
      for (Index l = 0; l < s.dec.restriction.local_size(i); ++l) {
        const Index g = s.dec.restriction.local_to_global[i][l];
        CHECK(static_cast<bool>(s.dec.local.bubble[i][l]) == (s.dec.mult.mu[g] == 1));
      }
  }

  TEST_CASE("center dof of a 2x2 split is a cross point") {
    const auto s = setup(8, 8, 2, 2);
    const long center = s.problem.node_dof[s.mesh.node(4, 4)];
    REQUIRE(center >= 0);
    CHECK(s.dec.mult.mu[center] == 4);
    CHECK(s.dec.mult.sharing[center] == std::vector<int>{0, 1, 2, 3});
    CHECK(s.dec.mult.mu_max == 4);
  }

  TEST_CASE("assembling is exact on generated instances") {
    for (auto kind : {meshfem::ProblemKind::laplace, meshfem::ProblemKind::helmholtz,
                      meshfem::ProblemKind::reaction_diffusion}) {
      const auto s = setup(12, 12, 3, 4, kind);
      const auto rep = decomp::check_assembling(s.dec.restriction, s.dec.local, s.problem);
      CHECK(rep.exact);
    }
  }

  TEST_CASE("perturbed local entry is flagged") {
    auto s = setup(8, 8, 2, 2);
    auto& a = s.dec.local.A0[1];
    a.values()[0] += 1e-3;
    const auto rep = decomp::check_assembling(s.dec.restriction, s.dec.local, s.problem);
    CHECK_FALSE(rep.passed);
    const Index r0 = 0;
    const Index c0 = a.col_idx()[0];
    CHECK(rep.worst_row == s.dec.restriction.local_to_global[1][r0]);
    CHECK(rep.worst_col == s.dec.restriction.local_to_global[1][c0]);
  }

  TEST_CASE("twin scalar decomposition") {
    formulations::TwinScalarParams p;
    p.a1 = 1.0;
    p.a2 = 1.0;
    const auto inst = formulations::make_twin_scalar(p);
    CHECK(inst.problem.size() == 1);
    CHECK(inst.problem.combined().at(0, 0) == Scalar(2.0));
    CHECK(decomp::check_assembling(inst.dec.restriction, inst.dec.local, inst.problem).exact);
    CHECK_FALSE(inst.dec.local.bubble[0][0]);
    CHECK_FALSE(inst.dec.local.bubble[1][0]);
  }

  TEST_CASE("partition file round trip") {
    const auto m = meshfem::build_mesh(4, 4, BoundarySpec::all(BoundaryKind::robin));
    const auto p = decomp::partition_grid(m, 2, 2);
    std::stringstream ss;
    decomp::write_partition(ss, p);
    const auto q = decomp::read_partition(ss);
    CHECK(q.owner == p.owner);
  }
}
