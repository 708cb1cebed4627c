#pragma once

// Walsh-Fourier analysis of f : {-1,1}^n -> R^k.
// Input x is stored as a bitmask b with x_i = -1 exactly when bit i is set,
// so chi_S(x) = (-1)^{popcount(S & b)} and subsets S are bitmasks too.

#include <bit>
#include <cmath>
#include <cstdint>
#include <istream>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qmclab/error.hpp"
#include "qmclab/graph.hpp"
#include "qmclab/random.hpp"
#include "qmclab/sdp.hpp"

namespace qmclab {

inline constexpr int kMaxBooleanInputs = 20;
inline constexpr double kBallTolerance = 1e-12;

class BooleanVectorFunction {
 public:
  BooleanVectorFunction(int n, RowMatrix table) : n_(n), table_(std::move(table)) {
    require(n_ >= 0 && n_ <= kMaxBooleanInputs, ErrorCode::InvalidArgument, "Boolean functions need 0 <= n <= 20");
    require(table_.rows() == (Eigen::Index{1} << n_), ErrorCode::InvalidArgument, "table needs 2^n rows");
    require(table_.cols() >= 1, ErrorCode::InvalidArgument, "output dimension must be >= 1");
    coeffs_ = table_;
    for (Eigen::Index c = 0; c < coeffs_.cols(); ++c) butterfly(c);
    coeffs_ /= static_cast<double>(table_.rows());
  }

  static BooleanVectorFunction from_coefficients(int n, RowMatrix coeffs) {
    BooleanVectorFunction f(n, RowMatrix::Zero(Eigen::Index{1} << n, coeffs.cols()));
    f.coeffs_ = std::move(coeffs);
    f.table_ = f.coeffs_;
    for (Eigen::Index c = 0; c < f.table_.cols(); ++c) f.butterfly_table(c);
    return f;
  }

  int n() const { return n_; }
  int k() const { return static_cast<int>(table_.cols()); }
  std::size_t size() const { return static_cast<std::size_t>(table_.rows()); }
  const RowMatrix& table() const { return table_; }
  /// f-hat(S) in row S.
  const RowMatrix& coefficients() const { return coeffs_; }

  /// Every value lies in the closed unit ball B^k.
  bool range_constrained() const {
    for (Eigen::Index i = 0; i < table_.rows(); ++i)
      if (table_.row(i).norm() > 1.0 + kBallTolerance) return false;
    return true;
  }

 private:
  // unnormalized Hadamard butterfly, self-inverse up to 2^n
  static void hadamard(RowMatrix& m, Eigen::Index col) {
    const Eigen::Index size = m.rows();
    for (Eigen::Index h = 1; h < size; h <<= 1) {
      for (Eigen::Index i = 0; i < size; i += 2 * h) {
        for (Eigen::Index j = i; j < i + h; ++j) {
          const double a = m(j, col), b = m(j + h, col);
          m(j, col) = a + b;
          m(j + h, col) = a - b;
        }
      }
    }
  }
  void butterfly(Eigen::Index col) { hadamard(coeffs_, col); }
  void butterfly_table(Eigen::Index col) { hadamard(table_, col); }

  int n_;
  RowMatrix table_;
  RowMatrix coeffs_;
};

/// Forward transform of a 2^n x k table; row S of the result is f-hat(S).
inline RowMatrix wht(const RowMatrix& table) {
  const int n = std::countr_zero(static_cast<std::uint64_t>(table.rows()));
  return BooleanVectorFunction(n, table).coefficients();
}

inline RowMatrix inverse_wht(const RowMatrix& coeffs) {
  const int n = std::countr_zero(static_cast<std::uint64_t>(coeffs.rows()));
  return BooleanVectorFunction::from_coefficients(n, coeffs).table();
}

inline int subset_size(std::uint64_t s) { return std::popcount(s); }

/// sum over S containing i with |S| <= m of ||f-hat(S)||^2; m < 0 means no cap.
inline double influence(const BooleanVectorFunction& f, int i, int m = -1) {
  require(i >= 0 && i < f.n(), ErrorCode::InvalidArgument, "coordinate out of range");
  const auto& c = f.coefficients();
  double total = 0.0;
  for (std::uint64_t s = 0; s < f.size(); ++s) {
    if (!((s >> i) & 1u)) continue;
    if (m >= 0 && subset_size(s) > m) continue;
    total += c.row(static_cast<Eigen::Index>(s)).squaredNorm();
  }
  return total;
}

inline double variance(const BooleanVectorFunction& f) {
  return f.coefficients().squaredNorm() - f.coefficients().row(0).squaredNorm();
}

/// sum over |S| > m of ||f-hat(S)||^2.
inline double high_degree_variance(const BooleanVectorFunction& f, int m) {
  const auto& c = f.coefficients();
  double total = 0.0;
  for (std::uint64_t s = 0; s < f.size(); ++s)
    if (subset_size(s) > m) total += c.row(static_cast<Eigen::Index>(s)).squaredNorm();
  return total;
}

/// E ||f(x)||^2.
inline double mean_square_norm(const BooleanVectorFunction& f) {
  return f.table().squaredNorm() / static_cast<double>(f.size());
}

inline double parseval_gap(const BooleanVectorFunction& f) {
  return std::abs(f.coefficients().squaredNorm() - mean_square_norm(f));
}

/// T_rho scales f-hat(S) by rho^{|S|}.
inline BooleanVectorFunction noise_operator(const BooleanVectorFunction& f, double rho) {
  RowMatrix c = f.coefficients();
  for (std::uint64_t s = 0; s < f.size(); ++s) c.row(static_cast<Eigen::Index>(s)) *= std::pow(rho, subset_size(s));
  return BooleanVectorFunction::from_coefficients(f.n(), std::move(c));
}

inline double stab(const BooleanVectorFunction& f, double rho) {
  require(rho >= -1.0 && rho <= 1.0, ErrorCode::DomainError, "rho must lie in [-1, 1]");
  const auto& c = f.coefficients();
  double total = 0.0;
  for (std::uint64_t s = 0; s < f.size(); ++s)
    total += std::pow(rho, subset_size(s)) * c.row(static_cast<Eigen::Index>(s)).squaredNorm();
  return total;
}

/// Stab_rho by summing over all 4^n correlated pairs; n <= 10.
inline double stab_enumeration(const BooleanVectorFunction& f, double rho) {
  require(f.n() <= 10, ErrorCode::InvalidArgument, "enumeration supports n <= 10");
  const double same = (1.0 + rho) / 2.0, diff = (1.0 - rho) / 2.0;
  std::vector<double> weight(static_cast<std::size_t>(f.n()) + 1);
  for (int d = 0; d <= f.n(); ++d)
    weight[static_cast<std::size_t>(d)] = std::pow(same, f.n() - d) * std::pow(diff, d) / static_cast<double>(f.size());
  const auto& t = f.table();
  double total = 0.0;
  for (std::uint64_t x = 0; x < f.size(); ++x)
    for (std::uint64_t y = 0; y < f.size(); ++y)
      total += weight[static_cast<std::size_t>(subset_size(x ^ y))] *
               t.row(static_cast<Eigen::Index>(x)).dot(t.row(static_cast<Eigen::Index>(y)));
  return total;
}

struct StabEstimate {
  double mean = 0.0;
  double stderr_mean = 0.0;
  long samples = 0;
};

/// Direct sampling of (x, y) with y_i = x_i independently with probability (1 + rho)/2.
inline StabEstimate stab_sampled(const BooleanVectorFunction& f, double rho, long samples, std::uint64_t seed) {
  require(samples >= 1, ErrorCode::InvalidArgument, "need at least one sample");
  Rng rng(seed);
  std::uniform_int_distribution<std::uint64_t> pick(0, f.size() - 1);
  std::bernoulli_distribution flip((1.0 - rho) / 2.0);
  RunningStats stats;
  const auto& t = f.table();
  for (long s = 0; s < samples; ++s) {
    const std::uint64_t x = pick(rng);
    std::uint64_t y = x;
    for (int i = 0; i < f.n(); ++i)
      if (flip(rng)) y ^= std::uint64_t{1} << i;
    stats.add(t.row(static_cast<Eigen::Index>(x)).dot(t.row(static_cast<Eigen::Index>(y))));
  }
  return {stats.mean(), stats.stderr_mean(), samples};
}

/// g(x) = (f(x) - f(-x)) / 2: keeps exactly the odd-|S| coefficients.
inline BooleanVectorFunction odd_part(const BooleanVectorFunction& f) {
  const std::uint64_t all = f.size() - 1;
  RowMatrix g(f.table().rows(), f.table().cols());
  for (std::uint64_t x = 0; x < f.size(); ++x)
    g.row(static_cast<Eigen::Index>(x)) =
        0.5 * (f.table().row(static_cast<Eigen::Index>(x)) - f.table().row(static_cast<Eigen::Index>(x ^ all)));
  return BooleanVectorFunction(f.n(), std::move(g));
}

/// Coordinates with Inf_i^{<=m} >= delta. For range-constrained f there are at
/// most m / delta of them; finding more means the function left the ball.
inline std::vector<int> notable_coordinates(const BooleanVectorFunction& f, int m, double delta) {
  require(delta > 0.0, ErrorCode::InvalidArgument, "delta must be positive");
  require(m >= 1, ErrorCode::InvalidArgument, "degree cap must be >= 1");
  std::vector<int> out;
  for (int i = 0; i < f.n(); ++i)
    if (influence(f, i, m) >= delta) out.push_back(i);
  if (f.range_constrained()) {
    require(static_cast<double>(out.size()) <= m / delta + 1e-12, ErrorCode::DomainError,
            "notable coordinate count exceeds m / delta");
  }
  return out;
}

// ---------------------------------------------------------------------------
// Standard functions

/// x -> (x_i, 0, ..., 0) in R^k.
inline BooleanVectorFunction embedded_dictator(int n, int k, int i) {
  require(i >= 0 && i < n, ErrorCode::InvalidArgument, "dictator coordinate out of range");
  require(k >= 1, ErrorCode::InvalidArgument, "output dimension must be >= 1");
  RowMatrix t = RowMatrix::Zero(Eigen::Index{1} << n, k);
  for (Eigen::Index x = 0; x < t.rows(); ++x) t(x, 0) = (x >> i) & 1 ? -1.0 : 1.0;
  return BooleanVectorFunction(n, std::move(t));
}

/// Majority of n (odd) bits placed in output coordinate `slot` of R^k.
inline BooleanVectorFunction majority(int n, int k = 1, int slot = 0) {
  require(n >= 1 && n % 2 == 1, ErrorCode::InvalidArgument, "majority needs an odd number of inputs");
  require(slot >= 0 && slot < k, ErrorCode::InvalidArgument, "output slot out of range");
  RowMatrix t = RowMatrix::Zero(Eigen::Index{1} << n, k);
  for (Eigen::Index x = 0; x < t.rows(); ++x)
    t(x, slot) = 2 * std::popcount(static_cast<std::uint64_t>(x)) > n ? -1.0 : 1.0;
  return BooleanVectorFunction(n, std::move(t));
}

inline BooleanVectorFunction constant_function(int n, const std::vector<double>& value) {
  RowMatrix t(Eigen::Index{1} << n, static_cast<Eigen::Index>(value.size()));
  for (Eigen::Index x = 0; x < t.rows(); ++x)
    for (Eigen::Index j = 0; j < t.cols(); ++j) t(x, j) = value[static_cast<std::size_t>(j)];
  return BooleanVectorFunction(n, std::move(t));
}

/// Values drawn uniformly from the ball B^k (direction uniform, radius U^{1/k}).
inline BooleanVectorFunction random_ball_function(int n, int k, std::uint64_t seed) {
  GaussianSampler gauss(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  RowMatrix t(Eigen::Index{1} << n, k);
  std::vector<double> dir(static_cast<std::size_t>(k));
  for (Eigen::Index x = 0; x < t.rows(); ++x) {
    gauss.unit_vector(dir);
    const double r = std::pow(unif(gauss.engine()), 1.0 / k);
    for (Eigen::Index j = 0; j < k; ++j) t(x, j) = r * dir[static_cast<std::size_t>(j)];
  }
  return BooleanVectorFunction(n, std::move(t));
}

/// Value of f on the noisy hypercube with self-loops kept: 1/4 - Stab_rho[f]/4.
inline double hypercube_value(const BooleanVectorFunction& f, double rho) { return 0.25 - stab(f, rho) / 4.0; }

/// Evaluates sum_e w_e (1/4 - <f(u), f(v)>/4) on a graph whose labels are
/// "+"/"-" strings of length n (character i is coordinate i).
inline double evaluate_on_cube_graph(const WeightedGraph& g, const BooleanVectorFunction& f) {
  std::vector<Eigen::Index> row(g.vertex_count());
  for (std::size_t v = 0; v < g.vertex_count(); ++v) {
    const auto& label = g.label(v);
    require(label.size() == static_cast<std::size_t>(f.n()), ErrorCode::MissingVertex,
            "vertex '" + label + "' is not a point of the cube");
    Eigen::Index mask = 0;
    for (int i = 0; i < f.n(); ++i)
      if (label[static_cast<std::size_t>(i)] == '-') mask |= Eigen::Index{1} << i;
    row[v] = mask;
  }
  double total = 0.0;
  for (const auto& e : g.edges())
    total += e.w * (0.25 - 0.25 * f.table().row(row[e.u]).dot(f.table().row(row[e.v])));
  return total;
}

/// Table file: "qmclab-boolfn v1", then "n <n> k <k>", then 2^n lines of k
/// reals in input-bitmask order.
inline constexpr const char* kBooleanHeader = "qmclab-boolfn v1";

inline BooleanVectorFunction read_boolean_table(std::istream& is) {
  std::string header;
  std::getline(is, header);
  require(header == kBooleanHeader, ErrorCode::ParseError, "expected header '" + std::string(kBooleanHeader) + "'");
  std::string tn, tk;
  int n = -1, k = -1;
  is >> tn >> n >> tk >> k;
  require(is && tn == "n" && tk == "k" && n >= 0 && n <= kMaxBooleanInputs && k >= 1, ErrorCode::ParseError,
          "expected 'n <n> k <k>'");
  RowMatrix t(Eigen::Index{1} << n, k);
  for (Eigen::Index x = 0; x < t.rows(); ++x)
    for (Eigen::Index j = 0; j < k; ++j) {
      require(static_cast<bool>(is >> t(x, j)), ErrorCode::ParseError, "table ended early");
      require(std::isfinite(t(x, j)), ErrorCode::ParseError, "table values must be finite");
    }
  return BooleanVectorFunction(n, std::move(t));
}

// ---------------------------------------------------------------------------

/// Proof constants of the dictator-test soundness argument, as plain
/// arithmetic: gamma = (1 + rho) eps / 6, delta = (eps / (12 k C_k))^{18 ln 2 / gamma},
/// m = ln(1/delta) / 18. delta is reported through its natural log because it
/// underflows for any realistic eps.
struct DictatorTestParameters {
  double gamma = 0.0;
  double log_delta = 0.0;
  double m = 0.0;
};

inline DictatorTestParameters dictator_test_parameters(double eps, double rho, int k, double c_k = 1.0) {
  require(eps > 0.0 && eps < 1.0, ErrorCode::DomainError, "eps must lie in (0, 1)");
  require(rho > -1.0 && rho <= 0.0, ErrorCode::DomainError, "rho must lie in (-1, 0]");
  require(k >= 1 && c_k > 0.0, ErrorCode::InvalidArgument, "need k >= 1 and C_k > 0");
  DictatorTestParameters p;
  p.gamma = (1.0 + rho) * eps / 6.0;
  p.log_delta = (18.0 * std::log(2.0) / p.gamma) * std::log(eps / (12.0 * k * c_k));
  p.m = -p.log_delta / 18.0;
  return p;
}

}  // namespace qmclab
