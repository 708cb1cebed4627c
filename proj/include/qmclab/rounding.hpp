#pragma once

// Projection rounding through one shared Gaussian matrix, Monte Carlo
// estimates of the rounded inner product, and the clamp-to-ball maps.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "qmclab/error.hpp"
#include "qmclab/graph.hpp"
#include "qmclab/random.hpp"
#include "qmclab/sdp.hpp"

namespace qmclab {

struct ProjectionRounding {
  UnitVectorAssignment assignment;
  int retries = 0;  ///< zero images redrawn (probability-zero event)
};

/// u -> Zu / |Zu| for one k x r matrix Z of i.i.d. standard Gaussians.
/// With k = 1 this is halfspace rounding sgn(<z, u>).
inline ProjectionRounding project_round(const UnitVectorAssignment& f, int k, std::uint64_t seed) {
  require(k >= 1, ErrorCode::InvalidArgument, "projection rounding needs k >= 1");
  const int r = f.rank();
  GaussianSampler gauss(seed);
  Eigen::MatrixXd z(k, r);
  for (Eigen::Index c = 0; c < z.cols(); ++c)
    for (Eigen::Index i = 0; i < z.rows(); ++i) z(i, c) = gauss();

  ProjectionRounding out;
  RowMatrix image;
  for (;;) {
    image = f.vectors() * z.transpose();
    bool degenerate = false;
    for (Eigen::Index i = 0; i < image.rows(); ++i) {
      const double n = image.row(i).norm();
      if (n == 0.0) {
        degenerate = true;
        break;
      }
      image.row(i) /= n;
    }
    if (!degenerate) break;
    ++out.retries;
    const Eigen::Index col = static_cast<Eigen::Index>(out.retries - 1) % z.cols();
    for (Eigen::Index i = 0; i < z.rows(); ++i) z(i, col) = gauss();
  }
  out.assignment = UnitVectorAssignment(f.labels(), std::move(image));
  return out;
}

struct McEstimate {
  double mean = 0.0;
  double ci95 = 0.0;
  double stderr_mean = 0.0;
  long samples = 0;
};

/// E <Zu/|Zu|, Zv/|Zv|> for unit u, v with <u, v> = rho, by direct sampling.
/// u = e1 and v = rho e1 + sqrt(1 - rho^2) e2, so Zu = z1 and Zv = rho z1 + s z2.
inline McEstimate expected_inner_product_mc(double rho, int k, long samples, std::uint64_t seed) {
  require(rho >= -1.0 && rho <= 1.0, ErrorCode::DomainError, "rho must lie in [-1, 1]");
  require(k >= 1, ErrorCode::InvalidArgument, "k must be >= 1");
  require(samples >= 1000, ErrorCode::InvalidArgument, "at least 1000 samples required");
  if (rho == 1.0 || rho == -1.0) return {rho, 0.0, 0.0, samples};
  const double s = std::sqrt(1.0 - rho * rho);
  GaussianSampler gauss(seed);
  std::vector<double> z1(static_cast<std::size_t>(k)), z2(static_cast<std::size_t>(k));
  RunningStats stats;
  for (long i = 0; i < samples; ++i) {
    gauss.fill(z1);
    gauss.fill(z2);
    double uu = 0.0, vv = 0.0, uv = 0.0;
    for (std::size_t j = 0; j < z1.size(); ++j) {
      const double a = z1[j];
      const double b = rho * z1[j] + s * z2[j];
      uu += a * a;
      vv += b * b;
      uv += a * b;
    }
    if (uu == 0.0 || vv == 0.0) continue;
    stats.add(uv / std::sqrt(uu * vv));
  }
  return {stats.mean(), 1.96 * stats.stderr_mean(), stats.stderr_mean(), static_cast<long>(stats.count())};
}

struct RoundingReport {
  std::string graph_id;
  Objective objective;
  int k = 3;
  int trials = 0;
  double sdp_value = 0.0;
  double mean_rounded = 0.0;
  double ratio = 0.0;
  double stderr_mean = 0.0;
  int zero_image_retries = 0;
  std::vector<double> per_edge_mean;  ///< filled only when requested
};

struct RoundingOptions {
  int k = 3;
  int trials = 200;
  std::uint64_t seed = 0;
  bool per_edge = false;
};

/// Rounds a given vector solution `trials` times (trial t uses derive_seed(seed, t))
/// and compares the mean rounded value against the solution's own value.
inline RoundingReport empirical_rounding_ratio(const WeightedGraph& g, const Objective& obj,
                                               const UnitVectorAssignment& solution,
                                               const RoundingOptions& opt) {
  require(opt.trials >= 30, ErrorCode::InvalidArgument, "ratio reports need at least 30 trials");
  RoundingReport rep;
  rep.objective = obj;
  rep.k = opt.k;
  rep.trials = opt.trials;
  rep.sdp_value = evaluate_assignment(g, solution, obj);
  if (opt.per_edge) rep.per_edge_mean.assign(g.edge_count(), 0.0);
  RunningStats stats;
  for (int t = 0; t < opt.trials; ++t) {
    auto rounded = project_round(solution, opt.k, derive_seed(opt.seed, static_cast<std::uint64_t>(t)));
    rep.zero_image_retries += rounded.retries;
    stats.add(evaluate_assignment(g, rounded.assignment, obj));
    if (opt.per_edge) {
      const auto rows = rounded.assignment.rows_for(g);
      const auto& m = rounded.assignment.vectors();
      for (std::size_t e = 0; e < g.edge_count(); ++e) {
        const auto& edge = g.edges()[e];
        rep.per_edge_mean[e] += obj.edge_value(m.row(rows[edge.u]).dot(m.row(rows[edge.v]))) / opt.trials;
      }
    }
  }
  rep.mean_rounded = stats.mean();
  rep.stderr_mean = stats.stderr_mean();
  rep.ratio = rep.mean_rounded / rep.sdp_value;
  return rep;
}

/// Solves the SDP first (with `solver`), then rounds its optimizer.
inline RoundingReport empirical_rounding_ratio(const WeightedGraph& g, const Objective& obj,
                                               const RoundingOptions& opt, const SolverOptions& solver) {
  const auto sol = solve_vector_program(g, obj, solver);
  return empirical_rounding_ratio(g, obj, sol.assignment, opt);
}

// ---------------------------------------------------------------------------
// Clamp-to-ball maps

/// R(v): identity inside the unit ball, radial projection outside.
inline std::vector<double> round_to_ball(std::span<const double> v) {
  double n2 = 0.0;
  for (double x : v) n2 += x * x;
  std::vector<double> out(v.begin(), v.end());
  if (n2 > 1.0) {
    const double inv = 1.0 / std::sqrt(n2);
    for (double& x : out) x *= inv;
  }
  return out;
}

/// Phi(v) = v - R(v).
inline std::vector<double> ball_excess(std::span<const double> v) {
  auto r = round_to_ball(v);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = v[i] - r[i];
  return r;
}

/// Psi(v) = min(|v|^2, 1).
inline double clamped_square_norm(std::span<const double> v) {
  double n2 = 0.0;
  for (double x : v) n2 += x * x;
  return std::min(n2, 1.0);
}

}  // namespace qmclab
