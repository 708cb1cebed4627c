#pragma once

// Gaussian hypergeometric series, the projection-rounding curve F*(k, rho),
// and the worst-case approximation ratios built from it.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qmclab/error.hpp"

namespace qmclab {

struct Hypergeometric2F1Options {
  double relative_tolerance = 1e-15;
  long max_terms = 1'000'000;
};

/// 2F1(a, b; c; z) by direct summation of the power series for 0 <= z < 1.
inline double gauss_2f1(double a, double b, double c, double z,
                        const Hypergeometric2F1Options& opt = {}) {
  require(c > 0.0, ErrorCode::DomainError, "gauss_2f1 needs c > 0");
  require(z >= 0.0 && z < 1.0, ErrorCode::DomainError, "gauss_2f1 needs 0 <= z < 1");
  double term = 1.0;
  double sum = 1.0;
  if (z == 0.0) return 1.0;
  for (long n = 0; n < opt.max_terms; ++n) {
    const double dn = static_cast<double>(n);
    const double step = (a + dn) * (b + dn) / ((c + dn) * (dn + 1.0)) * z;
    term *= step;
    sum += term;
    // later term ratios stay below max(step, z) < 1, so the tail is geometric
    const double r = std::max(step, z);
    if (r < 1.0 && std::abs(term) * r / (1.0 - r) < opt.relative_tolerance * std::abs(sum)) return sum;
  }
  throw Error(ErrorCode::SlowConvergence,
              "2F1 series did not converge within " + std::to_string(opt.max_terms) + " terms (z=" +
                  std::to_string(z) + ")");
}

/// (Gamma((k+1)/2) / Gamma(k/2))^2 for integer k >= 1, by the half-integer
/// recursion g(k+2) = g(k) (k+1)/k from g(1) = 1/sqrt(pi), g(2) = sqrt(pi)/2.
inline double gamma_ratio_squared(int k) {
  require(k >= 1, ErrorCode::InvalidArgument, "gamma_ratio_squared needs k >= 1");
  double g = (k % 2 == 1) ? 1.0 / std::numbers::pi : std::numbers::pi / 4.0;
  for (int j = (k % 2 == 1) ? 1 : 2; j < k; j += 2) {
    const double f = (j + 1.0) / j;
    g *= f * f;
  }
  return g;
}

/// Expected inner product of two unit vectors at inner product rho after
/// projection onto a random k-dimensional Gaussian image and normalization.
inline double f_star(int k, double rho) {
  require(k >= 1, ErrorCode::InvalidArgument, "f_star needs k >= 1");
  require(rho >= -1.0 && rho <= 1.0, ErrorCode::DomainError, "f_star needs |rho| <= 1");
  if (rho == 1.0 || rho == -1.0) return rho;
  const double c = 2.0 / k * gamma_ratio_squared(k);
  return c * rho * gauss_2f1(0.5, 0.5, 0.5 * k + 1.0, rho * rho);
}

enum class RatioKind { MaxCut, Product, QuantumMaxCut };

/// One objective family: rank-k Max-Cut (k = 1 is GW, k = 3 is BOV) or the
/// GP ratio for Quantum Max-Cut (always rounds to rank 3).
struct RatioFamily {
  std::string name;
  RatioKind kind = RatioKind::MaxCut;
  int k = 1;

  static RatioFamily gw() { return {"GW", RatioKind::MaxCut, 1}; }
  static RatioFamily rank_k_maxcut(int k) {
    return {k == 1 ? "GW" : std::to_string(k) + "MC", RatioKind::MaxCut, k};
  }
  static RatioFamily bov() { return {"BOV", RatioKind::Product, 3}; }
  static RatioFamily gp() { return {"GP", RatioKind::QuantumMaxCut, 3}; }

  /// Upper end of the admissible rho range (exclusive).
  double rho_upper() const { return kind == RatioKind::QuantumMaxCut ? 1.0 / 3.0 : 1.0; }
};

inline double ratio(const RatioFamily& family, double rho) {
  require(rho >= -1.0 && rho < family.rho_upper(), ErrorCode::DomainError,
          family.name + " ratio undefined at rho=" + std::to_string(rho));
  const double fs = f_star(family.k, rho);
  switch (family.kind) {
    case RatioKind::MaxCut: return (0.5 - 0.5 * fs) / (0.5 - 0.5 * rho);
    case RatioKind::Product: return (0.25 - 0.25 * fs) / (0.25 - 0.25 * rho);
    case RatioKind::QuantumMaxCut: return (0.25 - 0.25 * fs) / (0.25 - 0.75 * rho);
  }
  return std::numeric_limits<double>::quiet_NaN();
}

struct RatioReport {
  std::string kind;
  int k = 0;
  std::vector<std::pair<double, double>> grid;
  double alpha = 0.0;
  double rho_star = 0.0;
  double refine_tol = 0.0;
};

struct RatioSearchOptions {
  double grid_step = 1e-3;
  double refine_tol = 1e-8;
};

/// Minimizes the ratio over its domain: coarse grid, then golden-section
/// search on the bracket around the best grid point.
inline RatioReport find_alpha_rho(const RatioFamily& family, const RatioSearchOptions& opt = {}) {
  require(opt.grid_step > 0.0 && opt.refine_tol > 0.0, ErrorCode::InvalidArgument,
          "grid_step and refine_tol must be positive");
  RatioReport report;
  report.kind = family.name;
  report.k = family.k;
  report.refine_tol = opt.refine_tol;

  const double upper = family.rho_upper();
  const auto steps = static_cast<long>(std::floor((upper - (-1.0)) / opt.grid_step));
  std::size_t best = 0;
  for (long i = 0; i <= steps; ++i) {
    const double rho = -1.0 + static_cast<double>(i) * opt.grid_step;
    if (rho >= upper) break;
    report.grid.emplace_back(rho, ratio(family, rho));
    if (report.grid.back().second < report.grid[best].second) best = report.grid.size() - 1;
  }

  double lo = report.grid[best].first - opt.grid_step;
  double hi = report.grid[best].first + opt.grid_step;
  lo = std::max(lo, -1.0);
  hi = std::min(hi, std::nextafter(upper, -1.0));
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = ratio(family, x1);
  double f2 = ratio(family, x2);
  while (hi - lo > opt.refine_tol) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = ratio(family, x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = ratio(family, x2);
    }
  }
  const double mid = 0.5 * (lo + hi);
  const double fmid = ratio(family, mid);
  if (fmid <= report.grid[best].second) {
    report.alpha = fmid;
    report.rho_star = mid;
  } else {
    report.alpha = report.grid[best].second;
    report.rho_star = report.grid[best].first;
  }
  return report;
}

/// The five shipped constant families: GW (1MC), 2MC, BOV (3MC), GP and the
/// BOV product-state ratio are reported; 3MC and BOV coincide numerically.
inline std::vector<RatioFamily> shipped_families() {
  return {RatioFamily::gw(), RatioFamily::rank_k_maxcut(2), RatioFamily::rank_k_maxcut(3),
          RatioFamily::bov(), RatioFamily::gp()};
}

}  // namespace qmclab
