#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "qmclab/qmclab.hpp"

using namespace qmclab;

namespace {

UnitVectorAssignment planar_triangle(const WeightedGraph& k3) {
  RowMatrix rows(3, 2);
  for (int i = 0; i < 3; ++i) {
    const double a = 2.0 * std::numbers::pi * i / 3.0;
    rows(i, 0) = std::cos(a);
    rows(i, 1) = std::sin(a);
  }
  return UnitVectorAssignment(k3.labels(), rows);
}

}  // namespace

TEST(Assignment, RejectsNonUnitRows) {
  RowMatrix rows(2, 2);
  rows << 1, 0, 0.5, 0;
  EXPECT_THROW(UnitVectorAssignment({"a", "b"}, rows), Error);
  EXPECT_NO_THROW(UnitVectorAssignment::from_rows({"a", "b"}, rows));
}

TEST(Evaluate, AntipodalSingleEdgeQmc) {
  auto g = standard_graph(StandardKind::SingleEdge);
  RowMatrix rows(2, 1);
  rows << 1, -1;
  EXPECT_DOUBLE_EQ(evaluate_assignment(g, UnitVectorAssignment(g.labels(), rows), Objective::qmc()), 1.0);
}

TEST(Evaluate, ConstantAssignmentMcIsZero) {
  auto g = random_graph(6, 0.6, 3);
  RowMatrix rows = RowMatrix::Zero(6, 3);
  rows.col(1).setOnes();
  EXPECT_NEAR(evaluate_assignment(g, UnitVectorAssignment(g.labels(), rows), Objective::mc()), 0.0, 1e-15);
}

TEST(Evaluate, PlanarTriangleMc) {
  auto k3 = standard_graph(StandardKind::Complete, 3);
  EXPECT_NEAR(evaluate_assignment(k3, planar_triangle(k3), Objective::mc()), 0.75, 1e-15);
}

TEST(Evaluate, MissingVertex) {
  auto k3 = standard_graph(StandardKind::Complete, 3);
  RowMatrix rows(2, 1);
  rows << 1, -1;
  try {
    evaluate_assignment(k3, UnitVectorAssignment({"v1", "v2"}, rows), Objective::mc());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::MissingVertex);
  }
}

TEST(Evaluate, LabelOrderIndependent) {
  auto k3 = standard_graph(StandardKind::Complete, 3);
  auto f = planar_triangle(k3);
  RowMatrix rev = f.vectors().colwise().reverse();
  std::vector<std::string> labels(k3.labels().rbegin(), k3.labels().rend());
  EXPECT_NEAR(evaluate_assignment(k3, UnitVectorAssignment(labels, rev), Objective::mc()), 0.75, 1e-15);
}

TEST(Solver, SingleEdgeAntipodal) {
  for (int r : {1, 2, 3}) {
    SolverOptions opt;
    opt.rank = r;
    const auto s = solve_vector_program(standard_graph(StandardKind::SingleEdge), Objective::mc(), opt);
    EXPECT_NEAR(s.value, 1.0, 1e-12);
  }
}

TEST(Solver, TriangleMcAndQmc) {
  auto k3 = standard_graph(StandardKind::Complete, 3);
  SolverOptions opt;
  opt.rank = 3;
  opt.restarts = 5;
  opt.seed = 1;
  EXPECT_NEAR(solve_vector_program(k3, Objective::mc(), opt).value, 0.75, 1e-6);
  EXPECT_NEAR(solve_vector_program(k3, Objective::qmc(), opt).value, 0.625, 1e-6);
}

TEST(Solver, ValueMatchesAssignmentAndSweepsAreMonotone) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    auto g = random_graph(9, 0.5, seed);
    SolverOptions opt;
    opt.seed = seed;
    for (auto obj : {Objective::mc(), Objective::prod(), Objective::qmc()}) {
      const auto s = solve_vector_program(g, obj, opt);
      EXPECT_TRUE(s.monotone);
      EXPECT_NEAR(s.value, evaluate_assignment(g, s.assignment, obj), 1e-10);
      EXPECT_EQ(s.assignment.rank(), 9);
    }
  }
}

TEST(Solver, ReachesStationaryPoint) {
  auto g = standard_graph(StandardKind::Cycle, 7);
  const auto s = solve_vector_program(g, Objective::mc(), {});
  EXPECT_LT(s.residual, 1e-4);
  // odd cycle optimum: 1/2 - 1/2 cos(6 pi / 7)
  EXPECT_NEAR(s.value, 0.5 - 0.5 * std::cos(6.0 * std::numbers::pi / 7.0), 1e-6);
}

TEST(Solver, RankMonotone) {
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    auto g = random_graph(8, 0.5, 100 + seed);
    double previous = -1.0;
    for (int r = 1; r <= 4; ++r) {
      SolverOptions opt;
      opt.rank = r;
      opt.seed = seed;
      opt.restarts = 5;
      const double v = solve_vector_program(g, Objective::mc(), opt).value;
      EXPECT_GE(v, previous - 1e-6) << "rank " << r;
      previous = std::max(previous, v);
    }
  }
}

TEST(Solver, SharedOptimizerIdentities) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto g = random_graph(6 + seed % 5, 0.5, 500 + seed);
    SolverOptions opt;
    opt.restarts = 3;
    opt.seed = seed;
    const double mc = solve_vector_program(g, Objective::mc(), opt).value;
    const double qmc = solve_vector_program(g, Objective::qmc(), opt).value;
    const double prod = solve_vector_program(g, Objective::prod(), opt).value;
    EXPECT_NEAR(qmc, 1.5 * mc - 0.5, 5e-4);
    EXPECT_NEAR(prod, 0.5 * mc, 5e-4);
  }
}

TEST(Solver, FastRank) {
  EXPECT_EQ(fast_rank(1024), 46);
  EXPECT_EQ(fast_rank(8), 4);
}

TEST(Solver, Deterministic) {
  auto g = random_graph(7, 0.6, 42);
  SolverOptions opt;
  opt.seed = 9;
  const auto a = solve_vector_program(g, Objective::qmc(), opt);
  const auto b = solve_vector_program(g, Objective::qmc(), opt);
  EXPECT_EQ(a.value, b.value);
  EXPECT_TRUE(a.assignment.vectors() == b.assignment.vectors());
}

TEST(Solver, NeedsNormalizedGraph) {
  auto g = WeightedGraph::from_indexed_edges({"a", "b"}, {{0, 1, 2.0}});
  EXPECT_THROW(solve_vector_program(g, Objective::mc()), Error);
}

TEST(Identities, Table) {
  auto a = sdp_identities(1.0);
  EXPECT_DOUBLE_EQ(a.prod, 0.5);
  EXPECT_DOUBLE_EQ(a.qmc, 1.0);
  auto b = sdp_identities(0.75);
  EXPECT_DOUBLE_EQ(b.prod, 0.375);
  EXPECT_DOUBLE_EQ(b.qmc, 0.625);
  auto c = sdp_identities(0.5);
  EXPECT_DOUBLE_EQ(c.prod, 0.25);
  EXPECT_DOUBLE_EQ(c.qmc, 0.25);
  EXPECT_THROW(sdp_identities(1.5), Error);
}

TEST(Solver, DominatesExactEnergy) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto g = random_graph(3 + seed % 8, 0.5, 900 + seed);
    SolverOptions opt;
    opt.seed = seed;
    const double sdp = solve_vector_program(g, Objective::qmc(), opt).value;
    const double exact = max_energy(build_hamiltonian(g), EigenMethod::Dense).value;
    EXPECT_GE(sdp, exact - 5e-4) << "vertices " << g.vertex_count();
  }
}
