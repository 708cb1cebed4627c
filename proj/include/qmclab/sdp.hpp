#pragma once

// Vector-form basic SDPs: maximize E_{(u,v)~E}[a - b <f(u), f(v)>] over
// f : V -> S^{r-1}, solved by row-by-row (block coordinate) ascent.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "qmclab/error.hpp"
#include "qmclab/graph.hpp"
#include "qmclab/random.hpp"

namespace qmclab {

enum class ObjectiveKind { MC, PROD, QMC, CUSTOM };

struct Objective {
  double a = 0.5;
  double b = 0.5;
  ObjectiveKind kind = ObjectiveKind::MC;

  static Objective mc() { return {0.5, 0.5, ObjectiveKind::MC}; }
  static Objective prod() { return {0.25, 0.25, ObjectiveKind::PROD}; }
  static Objective qmc() { return {0.25, 0.75, ObjectiveKind::QMC}; }
  static Objective custom(double a, double b) {
    require(b > 0.0, ErrorCode::InvalidArgument, "objective needs b > 0");
    return {a, b, ObjectiveKind::CUSTOM};
  }

  double edge_value(double inner) const { return a - b * inner; }
};

inline std::string to_string(ObjectiveKind k) {
  switch (k) {
    case ObjectiveKind::MC: return "MC";
    case ObjectiveKind::PROD: return "PROD";
    case ObjectiveKind::QMC: return "QMC";
    case ObjectiveKind::CUSTOM: return "CUSTOM";
  }
  return "CUSTOM";
}

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline constexpr double kUnitNormTolerance = 1e-9;

/// One unit vector per labelled vertex, stored as the rows of a |V| x r matrix.
class UnitVectorAssignment {
 public:
  UnitVectorAssignment() = default;

  UnitVectorAssignment(std::vector<std::string> labels, RowMatrix vectors)
      : labels_(std::move(labels)), vectors_(std::move(vectors)) {
    require(static_cast<Eigen::Index>(labels_.size()) == vectors_.rows(), ErrorCode::InvalidArgument,
            "assignment needs one row per label");
    for (Eigen::Index i = 0; i < vectors_.rows(); ++i) {
      require(std::abs(vectors_.row(i).norm() - 1.0) <= kUnitNormTolerance, ErrorCode::InvalidArgument,
              "assignment row for '" + labels_[static_cast<std::size_t>(i)] + "' is not a unit vector");
    }
  }

  /// Normalizes every row first; rows must be non-zero.
  static UnitVectorAssignment from_rows(std::vector<std::string> labels, RowMatrix vectors) {
    for (Eigen::Index i = 0; i < vectors.rows(); ++i) {
      const double n = vectors.row(i).norm();
      require(n > 0.0, ErrorCode::InvalidArgument, "zero row cannot be normalized");
      vectors.row(i) /= n;
    }
    return UnitVectorAssignment(std::move(labels), std::move(vectors));
  }

  const std::vector<std::string>& labels() const { return labels_; }
  const RowMatrix& vectors() const { return vectors_; }
  std::size_t size() const { return labels_.size(); }
  int rank() const { return static_cast<int>(vectors_.cols()); }

  /// Row index for each vertex of `g`, in graph order.
  std::vector<Eigen::Index> rows_for(const WeightedGraph& g) const {
    std::vector<Eigen::Index> rows(g.vertex_count());
    if (labels_ == g.labels()) {
      std::iota(rows.begin(), rows.end(), Eigen::Index{0});
      return rows;
    }
    std::unordered_map<std::string, Eigen::Index> index;
    for (std::size_t i = 0; i < labels_.size(); ++i) index.emplace(labels_[i], static_cast<Eigen::Index>(i));
    for (std::size_t v = 0; v < g.vertex_count(); ++v) {
      auto it = index.find(g.label(v));
      require(it != index.end(), ErrorCode::MissingVertex, "assignment has no vector for '" + g.label(v) + "'");
      rows[v] = it->second;
    }
    return rows;
  }

 private:
  std::vector<std::string> labels_;
  RowMatrix vectors_;
};

inline double evaluate_assignment(const WeightedGraph& g, const UnitVectorAssignment& f,
                                  const Objective& obj) {
  const auto rows = f.rows_for(g);
  const auto& m = f.vectors();
  CompensatedSum value;
  for (const auto& e : g.edges()) {
    value.add(e.w * obj.edge_value(m.row(rows[e.u]).dot(m.row(rows[e.v]))));
  }
  return value.value();
}

/// Symmetric neighbour lists without self-loops (CSR layout).
struct Adjacency {
  std::vector<std::size_t> offsets;
  std::vector<std::size_t> neighbors;
  std::vector<double> weights;
  double loop_weight = 0.0;

  explicit Adjacency(const WeightedGraph& g) {
    const std::size_t n = g.vertex_count();
    std::vector<std::size_t> degree(n, 0);
    for (const auto& e : g.edges()) {
      if (e.u == e.v) {
        loop_weight += e.w;
        continue;
      }
      ++degree[e.u];
      ++degree[e.v];
    }
    offsets.assign(n + 1, 0);
    for (std::size_t i = 0; i < n; ++i) offsets[i + 1] = offsets[i] + degree[i];
    neighbors.resize(offsets[n]);
    weights.resize(offsets[n]);
    std::vector<std::size_t> fill(offsets.begin(), offsets.end() - 1);
    for (const auto& e : g.edges()) {
      if (e.u == e.v) continue;
      neighbors[fill[e.u]] = e.v;
      weights[fill[e.u]++] = e.w;
      neighbors[fill[e.v]] = e.u;
      weights[fill[e.v]++] = e.w;
    }
  }
};

struct SdpSolution {
  UnitVectorAssignment assignment;
  double value = 0.0;
  int iterations = 0;
  double residual = 0.0;
  bool monotone = true;
  int restarts = 0;
};

struct SolverOptions {
  int rank = 0;          ///< 0 selects |V|
  double tol = 1e-10;    ///< stop once a sweep gains less than this
  int max_iter = 0;      ///< 0 selects 10 |V| log(1/tol)
  int restarts = 5;
  std::uint64_t seed = 0;
};

inline int fast_rank(std::size_t vertex_count) {
  return static_cast<int>(std::ceil(std::sqrt(2.0 * static_cast<double>(vertex_count))));
}

namespace detail {

inline double sweep_value(const Adjacency& adj, const RowMatrix& f, const Objective& obj) {
  double value = adj.loop_weight * obj.edge_value(1.0);
  const std::size_t n = adj.offsets.size() - 1;
  for (std::size_t u = 0; u < n; ++u) {
    for (std::size_t k = adj.offsets[u]; k < adj.offsets[u + 1]; ++k) {
      const std::size_t v = adj.neighbors[k];
      if (v < u) continue;
      value += adj.weights[k] * obj.edge_value(f.row(u).dot(f.row(v)));
    }
  }
  return value;
}

inline double riemannian_residual(const Adjacency& adj, const RowMatrix& f, const Objective& obj) {
  const std::size_t n = adj.offsets.size() - 1;
  Eigen::RowVectorXd grad(f.cols());
  double worst = 0.0;
  for (std::size_t u = 0; u < n; ++u) {
    grad.setZero();
    for (std::size_t k = adj.offsets[u]; k < adj.offsets[u + 1]; ++k) {
      grad.noalias() += adj.weights[k] * f.row(adj.neighbors[k]);
    }
    grad *= -obj.b;
    grad -= grad.dot(f.row(u)) * f.row(u);
    worst = std::max(worst, grad.norm());
  }
  return worst;
}

}  // namespace detail

/// Row-by-row ascent from one random start. Each update sets
/// f(u) <- -normalize(sum_v w_uv f(v)), the exact maximizer of the objective
/// in f(u) with all other rows fixed (b > 0). A zero neighbour sum keeps f(u).
inline SdpSolution ascend(const WeightedGraph& g, const Objective& obj, RowMatrix f, double tol,
                          int max_iter, std::uint64_t order_seed) {
  require(obj.b > 0.0, ErrorCode::InvalidArgument, "objective needs b > 0");
  const Adjacency adj(g);
  const std::size_t n = g.vertex_count();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(order_seed);
  Eigen::RowVectorXd sum(f.cols());

  SdpSolution sol;
  double value = detail::sweep_value(adj, f, obj);
  int it = 0;
  while (it < max_iter) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t u : order) {
      sum.setZero();
      for (std::size_t k = adj.offsets[u]; k < adj.offsets[u + 1]; ++k) {
        sum.noalias() += adj.weights[k] * f.row(adj.neighbors[k]);
      }
      const double norm = sum.norm();
      if (norm > 0.0) f.row(u) = -sum / norm;
    }
    ++it;
    const double next = detail::sweep_value(adj, f, obj);
    const double gain = next - value;
    if (gain < -1e-12 * std::max(1.0, std::abs(value))) sol.monotone = false;
    value = next;
    if (gain < tol) break;
  }
  sol.iterations = it;
  sol.value = value;
  sol.residual = detail::riemannian_residual(adj, f, obj);
  sol.assignment = UnitVectorAssignment(g.labels(), std::move(f));
  return sol;
}

inline RowMatrix random_unit_rows(std::size_t rows, int rank, std::uint64_t seed) {
  GaussianSampler gauss(seed);
  RowMatrix m(static_cast<Eigen::Index>(rows), rank);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    gauss.unit_vector(std::span<double>(m.row(i).data(), static_cast<std::size_t>(rank)));
  }
  return m;
}

/// Best of `restarts` independent ascents. The value is a certified lower
/// bound on the SDP optimum (it is attained by the returned assignment).
inline SdpSolution solve_vector_program(const WeightedGraph& g, const Objective& obj,
                                        const SolverOptions& opt = {}) {
  require(g.is_normalized(), ErrorCode::InvalidArgument, "solve_vector_program needs a normalized graph");
  require(opt.restarts >= 1, ErrorCode::InvalidArgument, "restarts must be >= 1");
  require(opt.tol > 0.0, ErrorCode::InvalidArgument, "tol must be positive");
  const std::size_t n = g.vertex_count();
  const int rank = opt.rank > 0 ? opt.rank : static_cast<int>(std::max<std::size_t>(n, 1));
  const int max_iter =
      opt.max_iter > 0
          ? opt.max_iter
          : static_cast<int>(std::ceil(10.0 * static_cast<double>(n) * std::log(1.0 / opt.tol)));

  std::optional<SdpSolution> best;
  bool monotone = true;
  for (int r = 0; r < opt.restarts; ++r) {
    const auto seed = derive_seed(opt.seed, static_cast<std::uint64_t>(r));
    auto sol = ascend(g, obj, random_unit_rows(n, rank, seed), opt.tol, max_iter, mix_seed(seed));
    monotone = monotone && sol.monotone;
    if (!best || sol.value > best->value) best = std::move(sol);
  }
  best->monotone = monotone;
  best->restarts = opt.restarts;
  return *best;
}

struct SdpIdentityValues {
  double prod = 0.0;
  double qmc = 0.0;
};

/// SDP_Prod = SDP_MC / 2 and SDP_QMC = 3/2 SDP_MC - 1/2: all three share an optimizer.
inline SdpIdentityValues sdp_identities(double mc_value) {
  require(mc_value >= 0.0 && mc_value <= 1.0, ErrorCode::DomainError, "MC SDP value must lie in [0, 1]");
  return {0.5 * mc_value, 1.5 * mc_value - 0.5};
}

}  // namespace qmclab
