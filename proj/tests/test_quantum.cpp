#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "qmclab/qmclab.hpp"

using namespace qmclab;

namespace {

UnitVectorAssignment bloch(const WeightedGraph& g, RowMatrix rows) { return UnitVectorAssignment(g.labels(), std::move(rows)); }

// Kronecker products of 2x2 Paulis, as an independent oracle for the bit-mask code.
Eigen::MatrixXcd pauli_matrix(char p) {
  Eigen::MatrixXcd m(2, 2);
  const std::complex<double> i(0, 1);
  if (p == 'I') m << 1, 0, 0, 1;
  if (p == 'X') m << 0, 1, 1, 0;
  if (p == 'Y') m << 0, -i, i, 0;
  if (p == 'Z') m << 1, 0, 0, -1;
  return m;
}

Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Eigen::MatrixXcd kron_string(const std::string& s) {
  Eigen::MatrixXcd m = pauli_matrix(s[0]);
  for (std::size_t q = 1; q < s.size(); ++q) m = kron(m, pauli_matrix(s[q]));
  return m;
}

Eigen::MatrixXcd reference_hamiltonian(const WeightedGraph& g) {
  const auto n = g.vertex_count();
  const auto dim = static_cast<Eigen::Index>(1) << n;
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(dim, dim);
  for (const auto& e : g.edges()) {
    h += e.w / 4.0 * Eigen::MatrixXcd::Identity(dim, dim);
    for (char p : {'X', 'Y', 'Z'}) {
      std::string s(n, 'I');
      s[e.u] = p;
      s[e.v] = p;
      h -= e.w / 4.0 * kron_string(s);
    }
  }
  return h;
}

}  // namespace

TEST(Hamiltonian, SingleEdgeIsSingletProjector) {
  const auto h = build_hamiltonian(standard_graph(StandardKind::SingleEdge)).dense_complex();
  Eigen::VectorXcd s(4);
  s << 0, 1 / std::sqrt(2.0), -1 / std::sqrt(2.0), 0;
  const Eigen::MatrixXcd proj = s * s.adjoint();
  EXPECT_LT((h - proj).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Hamiltonian, MatchesKroneckerConstruction) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    auto g = random_graph(2 + seed, 0.7, seed);
    const auto h = build_hamiltonian(g).dense_complex();
    EXPECT_LT((h - reference_hamiltonian(g)).cwiseAbs().maxCoeff(), 1e-14);
  }
}

TEST(Hamiltonian, TraceAndReality) {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    auto g = random_graph(3 + seed, 0.6, 40 + seed);
    const auto h = build_hamiltonian(g);
    EXPECT_TRUE(h.is_real());
    const auto dc = h.dense_complex();
    EXPECT_LT(dc.imag().cwiseAbs().maxCoeff(), 1e-14);
    EXPECT_NEAR(dc.trace().real(), std::ldexp(0.25, static_cast<int>(g.vertex_count())), 1e-10);
    EXPECT_NEAR(h.identity_coefficient(), 0.25, 1e-15);
    EXPECT_EQ(h.terms().size(), 3 * g.edge_count());
    // matvec agrees with the dense matrix
    const auto dr = h.dense_real();
    Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(static_cast<Eigen::Index>(h.dimension()), -1.0, 2.0);
    Eigen::VectorXd y;
    h.apply(x, y);
    EXPECT_LT((y - dr * x).cwiseAbs().maxCoeff(), 1e-13);
  }
}

TEST(Hamiltonian, ImaginaryTermsDetected) {
  const Hamiltonian h(2, 0.0, {{1.0, {{0, Pauli::Y}}}});
  EXPECT_FALSE(h.is_real());
  EXPECT_THROW(h.dense_real(), Error);
  Eigen::VectorXd x = Eigen::VectorXd::Ones(4), y;
  EXPECT_THROW(h.apply(x, y), Error);
  EXPECT_NEAR(h.dense_complex()(2, 0).imag(), 1.0, 1e-15);
}

TEST(Hamiltonian, TooManyQubits) {
  const auto big = random_graph(kMaxSparseQubits + 1, 0.2, 1);
  try {
    build_hamiltonian(big);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::TooManyQubits);
  }
  const auto mid = build_hamiltonian(standard_graph(StandardKind::Cycle, kMaxDenseQubits + 1));
  EXPECT_THROW(mid.dense_complex(), Error);
  EXPECT_THROW(max_energy(mid, EigenMethod::Dense), Error);
}

TEST(Hamiltonian, RejectsLoopsAndUnnormalized) {
  auto loopy = noisy_hypercube(2, -0.5, true).graph;
  EXPECT_THROW(build_hamiltonian(loopy), Error);
  EXPECT_THROW(build_hamiltonian(WeightedGraph::from_indexed_edges({"a", "b"}, {{0, 1, 3.0}})), Error);
}

TEST(DiagonalMax, HalfTheMaxCut) {
  EXPECT_NEAR(diagonal_max(standard_graph(StandardKind::Complete, 3)), 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(diagonal_max(standard_graph(StandardKind::SingleEdge)), 0.5, 1e-15);
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    auto g = random_graph(6, 0.5, seed);
    const Eigen::VectorXd diag = build_hamiltonian(g).dense_real().diagonal();
    EXPECT_NEAR(diagonal_max(g), diag.maxCoeff(), 1e-14);
  }
}

TEST(MaxEnergy, Examples) {
  auto edge = build_hamiltonian(standard_graph(StandardKind::SingleEdge));
  for (auto m : {EigenMethod::Dense, EigenMethod::Iterative}) {
    const auto r = max_energy(edge, m);
    EXPECT_NEAR(r.value, 1.0, 1e-12);
    EXPECT_NEAR(std::abs(r.state[1]), 1 / std::sqrt(2.0), 1e-10);
    EXPECT_NEAR(r.state[1], -r.state[2], 1e-10);
    EXPECT_NEAR(r.state[0], 0.0, 1e-10);
    EXPECT_NEAR(r.state.norm(), 1.0, 1e-12);
    EXPECT_EQ(r.method, m);
  }
  const auto k3 = build_hamiltonian(standard_graph(StandardKind::Complete, 3));
  EXPECT_NEAR(max_energy(k3, EigenMethod::Dense).value, 0.5, 1e-12);
  EXPECT_NEAR(max_energy(k3, EigenMethod::Iterative).value, 0.5, 1e-9);

  const auto e = standard_graph(StandardKind::SingleEdge);
  const auto two = build_hamiltonian(disjoint_union(e, e, 0.5));
  EXPECT_NEAR(max_energy(two, EigenMethod::Dense).value, 1.0, 1e-12);
}

TEST(MaxEnergy, DenseAndIterativeAgree) {
  for (std::uint64_t seed = 0; seed < 12; ++seed) {
    auto g = random_graph(2 + seed % 9, 0.5, 300 + seed);
    const auto h = build_hamiltonian(g);
    LanczosOptions opt;
    opt.seed = seed;
    const auto it = max_energy(h, EigenMethod::Iterative, opt);
    EXPECT_NEAR(max_energy(h, EigenMethod::Dense).value, it.value, 1e-8) << g.vertex_count();
    EXPECT_LT(it.residual, 1e-9);
    EXPECT_NEAR(residual_norm(h, it.state, it.value), it.residual, 1e-12);
  }
}

TEST(MaxEnergy, IterativeBeyondDenseLimit) {
  const auto g = standard_graph(StandardKind::Cycle, 14);
  const auto r = max_energy(build_hamiltonian(g), EigenMethod::Iterative);
  EXPECT_LT(r.residual, 1e-9);
  EXPECT_GE(r.value, diagonal_max(g));
  EXPECT_LE(r.value, 1.0);
}

TEST(MaxEnergy, NoConvergenceReported) {
  LanczosOptions opt;
  opt.krylov = 3;
  opt.max_restarts = 1;
  opt.tol = 1e-15;
  try {
    max_energy(build_hamiltonian(random_graph(9, 0.6, 2)), EigenMethod::Iterative, opt);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NoConvergence);
  }
}

TEST(Bloch, Examples) {
  auto edge = standard_graph(StandardKind::SingleEdge);
  RowMatrix anti(2, 3);
  anti << 0, 0, 1, 0, 0, -1;
  EXPECT_NEAR(energy_of_bloch(edge, bloch(edge, anti)), 0.5, 1e-15);

  auto g = random_graph(6, 0.7, 5);
  RowMatrix same = RowMatrix::Zero(6, 3);
  same.col(2).setOnes();
  EXPECT_NEAR(energy_of_bloch(g, bloch(g, same)), 0.0, 1e-15);

  auto k3 = standard_graph(StandardKind::Complete, 3);
  RowMatrix planar(3, 3);
  for (int i = 0; i < 3; ++i) planar.row(i) << std::cos(2 * std::numbers::pi * i / 3), std::sin(2 * std::numbers::pi * i / 3), 0;
  EXPECT_NEAR(energy_of_bloch(k3, bloch(k3, planar)), 0.375, 1e-15);

  RowMatrix wrong_rank(3, 2);
  wrong_rank << 1, 0, 0, 1, 1, 0;
  EXPECT_THROW(energy_of_bloch(k3, bloch(k3, wrong_rank)), Error);
}

TEST(Bloch, MatchesExpectationOfProductState) {
  // <psi_u psi_v| h |psi_u psi_v> for pure qubit states with Bloch vectors a, b
  auto edge = standard_graph(StandardKind::SingleEdge);
  const auto h = build_hamiltonian(edge).dense_complex();
  Rng rng(3);
  std::uniform_real_distribution<double> angle(0.0, std::numbers::pi);
  for (int trial = 0; trial < 20; ++trial) {
    RowMatrix rows(2, 3);
    Eigen::VectorXcd psi[2];
    for (int q = 0; q < 2; ++q) {
      const double th = angle(rng), ph = 2 * angle(rng);
      rows.row(q) << std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th);
      psi[q].resize(2);
      psi[q] << std::cos(th / 2), std::polar(std::sin(th / 2), ph);
    }
    Eigen::VectorXcd prod(4);
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) prod[2 * a + b] = psi[0][a] * psi[1][b];
    const double expectation = (prod.adjoint() * h * prod)(0, 0).real();
    EXPECT_NEAR(energy_of_bloch(edge, bloch(edge, rows)), expectation, 1e-12);
  }
}

TEST(ProductState, Examples) {
  const auto edge = product_state_value(standard_graph(StandardKind::SingleEdge), 5, 1e-10, 1);
  EXPECT_NEAR(edge.value, 0.5, 1e-12);
  const auto k3g = standard_graph(StandardKind::Complete, 3);
  const auto k3 = product_state_value(k3g, 10, 1e-12, 2);
  EXPECT_NEAR(k3.value, 0.375, 1e-6);
  // exhaustive grid: f(v1) = e_x, f(v2) in the xy-plane, f(v3) anywhere on the sphere
  double best = 0.0;
  const double step = 0.05;
  for (double a = 0.0; a < 2 * std::numbers::pi; a += step) {
    for (double t = 0.0; t <= std::numbers::pi; t += step) {
      for (double ph = 0.0; ph < 2 * std::numbers::pi; ph += step) {
        RowMatrix rows(3, 3);
        rows.row(0) << 1, 0, 0;
        rows.row(1) << std::cos(a), std::sin(a), 0;
        rows.row(2) << std::sin(t) * std::cos(ph), std::sin(t) * std::sin(ph), std::cos(t);
        best = std::max(best, energy_of_bloch(k3g, bloch(k3g, rows)));
      }
    }
  }
  EXPECT_NEAR(best, 0.375, 2e-3);
  EXPECT_LE(best, k3.value + 1e-6);
}

TEST(ProductState, ConsistentAndAtMostHalf) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto g = random_graph(3 + seed % 8, 0.5, 700 + seed);
    const auto p = product_state_value(g, 3, 1e-10, seed);
    EXPECT_NEAR(p.value, energy_of_bloch(g, p.bloch), 1e-12);
    EXPECT_LE(p.value, 0.5 + 1e-12);
  }
}

TEST(Relaxations, ProductBelowQuantumBelowSdp) {
  for (std::uint64_t seed = 0; seed < 15; ++seed) {
    auto g = random_graph(2 + seed % 9, 0.6, 1000 + seed);
    const double prod = product_state_value(g, 5, 1e-10, seed).value;
    const double qmc = max_energy(build_hamiltonian(g), EigenMethod::Dense).value;
    SolverOptions opt;
    opt.seed = seed;
    const double sdp = solve_vector_program(g, Objective::qmc(), opt).value;
    EXPECT_LE(prod, qmc + 1e-8);
    EXPECT_LE(qmc, sdp + 1e-8 + 5e-4);
  }
}

TEST(Energy, LinearInTheGraph) {
  auto a = random_graph(5, 0.6, 1);
  auto b = standard_graph(StandardKind::Cycle, 5);
  const double lambda = 0.3;
  std::vector<Edge> edges;
  for (const auto& e : a.edges()) edges.push_back({e.u, e.v, lambda * e.w});
  for (const auto& e : b.edges()) edges.push_back({e.u, e.v, (1 - lambda) * e.w});
  auto mix = normalize_weights(WeightedGraph::from_indexed_edges(a.labels(), edges));
  Eigen::VectorXd psi = Eigen::VectorXd::LinSpaced(32, -1.0, 1.5).normalized();
  EXPECT_NEAR(energy(build_hamiltonian(mix), psi),
              lambda * energy(build_hamiltonian(a), psi) + (1 - lambda) * energy(build_hamiltonian(b), psi), 1e-14);
}

TEST(Energy, SplitGraphProductStateWithinBrandaoHarrow) {
  const auto g = split_vertices(standard_graph(StandardKind::Complete, 3), 4);
  const double qmc = max_energy(build_hamiltonian(g), EigenMethod::Iterative).value;
  const double prod = product_state_value(g, 5, 1e-10, 3).value;
  EXPECT_LE(prod, qmc + 1e-8);
  EXPECT_LE(qmc - prod, bh_error_bound(bh_stats(g)));
  // K_{4,4,4}: every copy reuses its vertex's 120 degree Bloch vector
  EXPECT_NEAR(prod, 0.375, 1e-6);
}

TEST(Heisenberg, AffineConversion) {
  EXPECT_DOUBLE_EQ(qmc_from_heisenberg_minimum(-3.0), 1.0);
  EXPECT_DOUBLE_EQ(heisenberg_minimum_from_qmc(0.5), -1.0);
  for (double v : {-3.0, -1.2, 0.0, 1.0}) EXPECT_DOUBLE_EQ(heisenberg_minimum_from_qmc(qmc_from_heisenberg_minimum(v)), v);
  // K3: least eigenvalue of sum_e (XX + YY + ZZ) / 3 is -1, so QMaxCut = 1/2
  EXPECT_DOUBLE_EQ(qmc_from_heisenberg_minimum(-1.0), 0.5);
}

TEST(StateCsv, Format) {
  Eigen::VectorXd psi(4);
  psi << 0, 0.5, -0.5, 1e-20;
  std::ostringstream os;
  write_state_csv(os, psi, 1e-12);
  EXPECT_EQ(os.str(), "index,amplitude\n1,0.5\n2,-0.5\n");
}
