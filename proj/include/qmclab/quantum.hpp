#pragma once

// Quantum Max-Cut Hamiltonians as sums of Pauli strings, their top
// eigenpairs (dense or restarted Lanczos), and product-state values.

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qmclab/error.hpp"
#include "qmclab/graph.hpp"
#include "qmclab/random.hpp"
#include "qmclab/sdp.hpp"

namespace qmclab {

inline constexpr int kMaxSparseQubits = 24;
inline constexpr int kMaxDenseQubits = 12;

enum class Pauli : char { X = 'X', Y = 'Y', Z = 'Z' };

struct PauliTerm {
  double coefficient = 0.0;
  std::map<int, Pauli> factors;  ///< qubit index -> Pauli; empty means identity
};

/// Bit masks of a Pauli string. Qubit q sits at bit (n - 1 - q) of a basis
/// index, so |q0 q1 ... q_{n-1}> reads as a big-endian binary number.
struct PauliMasks {
  std::uint64_t flip = 0;   ///< X or Y
  std::uint64_t phase = 0;  ///< Y or Z: contributes (-1)^bit
  int y_count = 0;
};

class Hamiltonian {
 public:
  Hamiltonian(int qubits, double identity, std::vector<PauliTerm> terms)
      : qubits_(qubits), identity_(identity), terms_(std::move(terms)) {
    require(qubits_ >= 1, ErrorCode::InvalidArgument, "Hamiltonian needs at least one qubit");
    require(qubits_ <= kMaxSparseQubits, ErrorCode::TooManyQubits,
            "at most " + std::to_string(kMaxSparseQubits) + " qubits are supported");
    for (const auto& t : terms_) {
      require(std::isfinite(t.coefficient), ErrorCode::InvalidArgument, "Pauli coefficient must be finite");
      PauliMasks m;
      for (const auto& [q, p] : t.factors) {
        require(q >= 0 && q < qubits_, ErrorCode::InvalidArgument, "Pauli factor on a missing qubit");
        const std::uint64_t bit = std::uint64_t{1} << (qubits_ - 1 - q);
        if (p != Pauli::Z) m.flip |= bit;
        if (p != Pauli::X) m.phase |= bit;
        if (p == Pauli::Y) ++m.y_count;
      }
      masks_.push_back(m);
    }
  }

  int qubit_count() const { return qubits_; }
  std::size_t dimension() const { return std::size_t{1} << qubits_; }
  double identity_coefficient() const { return identity_; }
  const std::vector<PauliTerm>& terms() const { return terms_; }

  /// True when every term has an even number of Y factors, so H is real.
  bool is_real() const {
    return std::all_of(masks_.begin(), masks_.end(), [](const PauliMasks& m) { return m.y_count % 2 == 0; });
  }

  /// <b XOR flip| P |b> = i^{y} (-1)^{popcount(b & phase)} (Y = iXZ).
  static std::complex<double> amplitude(const PauliMasks& m, std::uint64_t b) {
    const double sign = (std::popcount(b & m.phase) & 1) ? -1.0 : 1.0;
    static constexpr std::complex<double> ipow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    return sign * ipow[m.y_count % 4];
  }

  /// y <- H x for real H.
  void apply(const Eigen::VectorXd& x, Eigen::VectorXd& y) const {
    require(is_real(), ErrorCode::InvalidArgument, "real matvec needs a real Hamiltonian");
    const std::size_t dim = dimension();
    y = identity_ * x;
    for (std::size_t k = 0; k < terms_.size(); ++k) {
      const auto& m = masks_[k];
      const double c = terms_[k].coefficient * ((m.y_count / 2) % 2 ? -1.0 : 1.0);
      for (std::uint64_t b = 0; b < dim; ++b) {
        const double s = (std::popcount(b & m.phase) & 1) ? -c : c;
        y[static_cast<Eigen::Index>(b ^ m.flip)] += s * x[static_cast<Eigen::Index>(b)];
      }
    }
  }

  Eigen::MatrixXcd dense_complex() const {
    require(qubits_ <= kMaxDenseQubits, ErrorCode::TooManyQubits,
            "dense mode supports at most " + std::to_string(kMaxDenseQubits) + " qubits");
    const auto dim = static_cast<Eigen::Index>(dimension());
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Identity(dim, dim) * identity_;
    for (std::size_t k = 0; k < terms_.size(); ++k) {
      for (std::uint64_t b = 0; b < dimension(); ++b) {
        h(static_cast<Eigen::Index>(b ^ masks_[k].flip), static_cast<Eigen::Index>(b)) +=
            terms_[k].coefficient * amplitude(masks_[k], b);
      }
    }
    return h;
  }

  Eigen::MatrixXd dense_real() const {
    const Eigen::MatrixXcd h = dense_complex();
    require(h.imag().cwiseAbs().maxCoeff() < 1e-14, ErrorCode::InvalidArgument, "Hamiltonian is not real");
    return h.real();
  }

 private:
  int qubits_;
  double identity_;
  std::vector<PauliTerm> terms_;
  std::vector<PauliMasks> masks_;
};

/// H = sum_e w_e (I - X_u X_v - Y_u Y_v - Z_u Z_v) / 4 on a normalized, loop-free graph.
inline Hamiltonian build_hamiltonian(const WeightedGraph& g) {
  require(g.is_normalized(), ErrorCode::InvalidArgument, "Hamiltonian needs a normalized graph");
  require(!g.has_loops(), ErrorCode::InvalidArgument, "Hamiltonian needs a loop-free graph");
  require(g.vertex_count() <= static_cast<std::size_t>(kMaxSparseQubits), ErrorCode::TooManyQubits,
          "graph has more than " + std::to_string(kMaxSparseQubits) + " vertices");
  std::vector<PauliTerm> terms;
  double identity = 0.0;
  for (const auto& e : g.edges()) {
    identity += e.w / 4.0;
    const int u = static_cast<int>(e.u), v = static_cast<int>(e.v);
    for (Pauli p : {Pauli::X, Pauli::Y, Pauli::Z}) terms.push_back({-e.w / 4.0, {{u, p}, {v, p}}});
  }
  return Hamiltonian(static_cast<int>(g.vertex_count()), identity, std::move(terms));
}

enum class EigenMethod { Dense, Iterative };

struct EnergyResult {
  double value = 0.0;
  Eigen::VectorXd state;
  EigenMethod method = EigenMethod::Dense;
  int iterations = 0;
  double residual = 0.0;
};

struct LanczosOptions {
  double tol = 1e-9;
  int krylov = 60;
  int max_restarts = 500;
  std::uint64_t seed = 0;
};

inline double residual_norm(const Hamiltonian& h, const Eigen::VectorXd& psi, double lambda) {
  Eigen::VectorXd hp;
  h.apply(psi, hp);
  return (hp - lambda * psi).norm();
}

/// Restarted Lanczos with full reorthogonalization, restarting from the top
/// Ritz vector until ||H psi - lambda psi|| < tol.
inline EnergyResult lanczos_max(const Hamiltonian& h, const LanczosOptions& opt = {}) {
  const auto dim = static_cast<Eigen::Index>(h.dimension());
  const Eigen::Index m = std::min<Eigen::Index>(opt.krylov, dim);
  GaussianSampler gauss(opt.seed);
  Eigen::VectorXd start(dim);
  for (Eigen::Index i = 0; i < dim; ++i) start[i] = gauss();
  start.normalize();

  Eigen::MatrixXd basis(dim, m);
  Eigen::VectorXd w;
  EnergyResult out;
  out.method = EigenMethod::Iterative;
  for (int restart = 1; restart <= opt.max_restarts; ++restart) {
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m, m);
    basis.col(0) = start;
    Eigen::Index used = m;
    for (Eigen::Index j = 0; j < m; ++j) {
      h.apply(basis.col(j), w);
      for (int pass = 0; pass < 2; ++pass) {
        const Eigen::VectorXd proj = basis.leftCols(j + 1).transpose() * w;
        w.noalias() -= basis.leftCols(j + 1) * proj;
        if (pass == 0) t.col(j).head(j + 1) = proj;
        else t.col(j).head(j + 1) += proj;
      }
      const double beta = w.norm();
      if (j + 1 == m) break;
      if (beta < 1e-12) {
        used = j + 1;
        break;
      }
      t(j + 1, j) = beta;
      basis.col(j + 1) = w / beta;
    }
    const Eigen::MatrixXd tt = t.topLeftCorner(used, used);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (tt + tt.transpose()));
    const Eigen::Index top = used - 1;
    start = basis.leftCols(used) * es.eigenvectors().col(top);
    start.normalize();
    out.value = es.eigenvalues()[top];
    out.residual = residual_norm(h, start, out.value);
    out.iterations = restart;
    if (out.residual < opt.tol) {
      out.value = start.dot([&] {
        Eigen::VectorXd hp;
        h.apply(start, hp);
        return hp;
      }());
      out.state = start;
      return out;
    }
  }
  throw Error(ErrorCode::NoConvergence,
              "Lanczos did not converge after " + std::to_string(opt.max_restarts) + " restarts (residual " +
                  format_double(out.residual) + ")");
}

inline EnergyResult dense_max(const Hamiltonian& h) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h.dense_real());
  const Eigen::Index top = es.eigenvalues().size() - 1;
  EnergyResult out;
  out.method = EigenMethod::Dense;
  out.value = es.eigenvalues()[top];
  out.state = es.eigenvectors().col(top);
  out.residual = residual_norm(h, out.state, out.value);
  return out;
}

inline EnergyResult max_energy(const Hamiltonian& h, EigenMethod method, const LanczosOptions& opt = {}) {
  return method == EigenMethod::Dense ? dense_max(h) : lanczos_max(h, opt);
}

/// <psi| H |psi> for a real unit state.
inline double energy(const Hamiltonian& h, const Eigen::VectorXd& psi) {
  Eigen::VectorXd hp;
  h.apply(psi, hp);
  return psi.dot(hp);
}

/// Largest computational-basis energy: the max eigenvalue of the diagonal part,
/// sum_e w_e (1 - z_u z_v) / 4, i.e. half the best cut.
inline double diagonal_max(const WeightedGraph& g) {
  require(g.vertex_count() <= static_cast<std::size_t>(kMaxSparseQubits), ErrorCode::TooManyQubits,
          "too many vertices for basis enumeration");
  const std::uint64_t dim = std::uint64_t{1} << g.vertex_count();
  double best = 0.0;
  for (std::uint64_t b = 0; b < dim; ++b) {
    double v = 0.0;
    for (const auto& e : g.edges()) {
      if (((b >> e.u) & 1) != ((b >> e.v) & 1)) v += e.w / 2.0;
    }
    best = std::max(best, v);
  }
  return best;
}

/// Product-state energy sum_e w_e (1/4 - <f(u), f(v)>/4) of Bloch vectors on S^2.
inline double energy_of_bloch(const WeightedGraph& g, const UnitVectorAssignment& f) {
  require(f.rank() == 3, ErrorCode::InvalidArgument, "Bloch vectors live in R^3");
  return evaluate_assignment(g, f, Objective::prod());
}

struct ProductStateResult {
  double value = 0.0;
  UnitVectorAssignment bloch;
  int restarts = 0;
};

/// Best product state found by sphere ascent with rank 3 on the product objective.
inline ProductStateResult product_state_value(const WeightedGraph& g, int restarts, double tol,
                                              std::uint64_t seed) {
  SolverOptions opt;
  opt.rank = 3;
  opt.restarts = restarts;
  opt.tol = tol;
  opt.seed = seed;
  auto sol = solve_vector_program(g, Objective::prod(), opt);
  ProductStateResult out;
  out.value = energy_of_bloch(g, sol.assignment);
  out.bloch = std::move(sol.assignment);
  out.restarts = restarts;
  return out;
}

/// QMaxCut(G) = (1 - nu) / 4 where nu is the least eigenvalue of the
/// Heisenberg sum_e w_e (XX + YY + ZZ).
inline double qmc_from_heisenberg_minimum(double nu) { return (1.0 - nu) / 4.0; }
inline double heisenberg_minimum_from_qmc(double qmc) { return 1.0 - 4.0 * qmc; }

inline void write_state_csv(std::ostream& os, const Eigen::VectorXd& psi, double cutoff = 0.0) {
  os << "index,amplitude\n";
  for (Eigen::Index i = 0; i < psi.size(); ++i) {
    if (std::abs(psi[i]) > cutoff) os << i << ',' << format_double(psi[i]) << '\n';
  }
}

}  // namespace qmclab
