#pragma once

// Instance families: the rho-noisy hypercube, the discretized Gaussian graph,
// the Unique-Games reduction graph, and small fixtures.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "qmclab/error.hpp"
#include "qmclab/graph.hpp"
#include "qmclab/random.hpp"
#include "qmclab/sdp.hpp"

namespace qmclab {

/// Edge-list materialization of {-1,1}^n has 2^{n-1}(2^n+1) edges; 12 keeps it under ~10^7.
inline constexpr int kMaxHypercubeDimension = 12;
inline constexpr int kMaxUgLabels = 10;

struct GapInstance {
  WeightedGraph graph;
  double w_loops = 0.0;
};

/// Label of x in {-1,1}^n stored as a bitmask: bit i set means x_{i+1} = -1.
inline std::string cube_label(std::uint32_t mask, int n) {
  std::string s(static_cast<std::size_t>(n), '+');
  for (int i = 0; i < n; ++i) {
    if (mask & (1u << i)) s[static_cast<std::size_t>(i)] = '-';
  }
  return s;
}

inline int cube_coordinate(std::uint32_t mask, int i) { return (mask >> i) & 1u ? -1 : 1; }

/// Pr[(X, Y) = (x, y)] for one ordered rho-correlated pair at Hamming distance d.
inline double correlated_pair_probability(int n, double rho, int d) {
  return std::ldexp(std::pow(0.5 + 0.5 * rho, n - d) * std::pow(0.5 - 0.5 * rho, d), -n);
}

inline GapInstance noisy_hypercube(int n, double rho, bool loops) {
  require(n >= 1, ErrorCode::InvalidArgument, "noisy_hypercube needs n >= 1");
  require(n <= kMaxHypercubeDimension, ErrorCode::DimensionTooLarge,
          "noisy_hypercube limited to n <= " + std::to_string(kMaxHypercubeDimension));
  require(rho >= -1.0 && rho <= 1.0, ErrorCode::DomainError, "rho must lie in [-1, 1]");
  const std::uint32_t size = 1u << n;
  std::vector<double> by_distance(static_cast<std::size_t>(n) + 1);
  for (int d = 0; d <= n; ++d) by_distance[static_cast<std::size_t>(d)] = correlated_pair_probability(n, rho, d);

  std::vector<std::string> labels;
  labels.reserve(size);
  for (std::uint32_t x = 0; x < size; ++x) labels.push_back(cube_label(x, n));
  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(size) * (size + 1) / 2);
  for (std::uint32_t x = 0; x < size; ++x) {
    for (std::uint32_t y = x; y < size; ++y) {
      const double p = by_distance[static_cast<std::size_t>(std::popcount(x ^ y))];
      if (p == 0.0) continue;
      edges.push_back({x, y, x == y ? p : 2.0 * p});
    }
  }
  auto g = normalize_weights(WeightedGraph::from_indexed_edges(std::move(labels), std::move(edges), true));
  if (loops) return {std::move(g), 0.0};
  auto removed = remove_self_loops(g);
  return {std::move(removed.graph), removed.w_loops};
}

// ---------------------------------------------------------------------------
// Discretized Gaussian graph

struct GaussianGraphParams {
  int n = 3;
  double rho = -0.5;
  int net_size = 16;
  long mc_samples = 0;  ///< 0 selects the minimum 10 net_size^2
  int split = 1;
  std::uint64_t seed = 0;
  int chunk_count = 8;
  bool antipodal_net = false;  ///< net closed under negation (net_size must be even)
  RowMatrix net;               ///< explicit unit centres (net_size x n); empty draws a random net
};

struct GaussianGraph {
  WeightedGraph graph;
  double w_loops = 0.0;
  RowMatrix centers;
  std::vector<std::size_t> cell_of_vertex;  ///< net cell of each graph vertex
  long samples = 0;
  int chunk_count = 0;
  double max_weight_stderr = 0.0;  ///< binomial standard error of the largest cell-pair weight
};

inline RowMatrix sphere_net(int n, int net_size, bool antipodal, std::uint64_t seed) {
  GaussianSampler gauss(seed);
  RowMatrix centers(net_size, n);
  const int free_points = antipodal ? net_size / 2 : net_size;
  for (int i = 0; i < free_points; ++i) {
    gauss.unit_vector(std::span<double>(centers.row(i).data(), static_cast<std::size_t>(n)));
  }
  if (antipodal) {
    for (int i = 0; i < free_points; ++i) centers.row(free_points + i) = -centers.row(i);
  }
  return centers;
}

inline std::size_t nearest_center(const RowMatrix& centers, const Eigen::RowVectorXd& point) {
  Eigen::Index best = 0;
  (centers * point.transpose()).maxCoeff(&best);
  return static_cast<std::size_t>(best);
}

/// Ordered cell-pair counts from radially projected rho-correlated Gaussian
/// pairs. Chunk c uses seed derive_seed(seed, 1 + c); the result depends only
/// on (seed, chunk_count).
inline std::vector<long> gaussian_cell_counts(const RowMatrix& centers, double rho, long samples,
                                              std::uint64_t seed, int chunk_count) {
  const auto net = static_cast<std::size_t>(centers.rows());
  const auto n = centers.cols();
  std::vector<long> counts(net * net, 0);
  const double sigma = std::sqrt(std::max(0.0, 1.0 - rho * rho));
  for (int c = 0; c < chunk_count; ++c) {
    const long begin = samples * c / chunk_count;
    const long end = samples * (c + 1) / chunk_count;
    GaussianSampler gauss(derive_seed(seed, 1 + static_cast<std::uint64_t>(c)));
    Eigen::RowVectorXd x(n), z(n), y(n);
    for (long s = begin; s < end; ++s) {
      for (Eigen::Index i = 0; i < n; ++i) x[i] = gauss();
      for (Eigen::Index i = 0; i < n; ++i) z[i] = gauss();
      y = rho * x + sigma * z;
      // Nearest centre of x/|x| equals nearest centre of x (max inner product).
      counts[nearest_center(centers, x) * net + nearest_center(centers, y)] += 1;
    }
  }
  return counts;
}

inline std::string cell_label(std::size_t i, std::size_t net) {
  const std::size_t width = std::to_string(net - 1).size();
  std::string digits = std::to_string(i);
  return "c" + std::string(width - digits.size(), '0') + digits;
}

inline GaussianGraph discretized_gaussian_graph(const GaussianGraphParams& p) {
  require(p.n >= 2, ErrorCode::InvalidArgument, "gaussian graph needs n >= 2");
  require(p.net_size >= 2, ErrorCode::InvalidArgument, "gaussian graph needs net_size >= 2");
  require(!p.antipodal_net || p.net_size % 2 == 0, ErrorCode::InvalidArgument,
          "antipodal net needs an even net_size");
  require(p.rho >= -1.0 && p.rho <= 1.0, ErrorCode::DomainError, "rho must lie in [-1, 1]");
  require(p.split >= 1 && p.chunk_count >= 1, ErrorCode::InvalidArgument, "split and chunk_count must be >= 1");
  const long min_samples = 10L * p.net_size * p.net_size;
  const long samples = p.mc_samples > 0 ? p.mc_samples : min_samples;
  require(samples >= min_samples, ErrorCode::InvalidArgument,
          "mc_samples must be at least 10 net_size^2 = " + std::to_string(min_samples));

  GaussianGraph out;
  if (p.net.size() > 0) {
    require(p.net.rows() == p.net_size && p.net.cols() == p.n, ErrorCode::InvalidArgument,
            "explicit net must be net_size x n");
    out.centers = p.net;
  } else {
    out.centers = sphere_net(p.n, p.net_size, p.antipodal_net, derive_seed(p.seed, 0));
  }
  out.samples = samples;
  out.chunk_count = p.chunk_count;
  const auto net = static_cast<std::size_t>(p.net_size);
  const auto counts = gaussian_cell_counts(out.centers, p.rho, samples, p.seed, p.chunk_count);

  std::vector<long> hits(net, 0);
  for (std::size_t i = 0; i < net; ++i) {
    for (std::size_t j = 0; j < net; ++j) {
      hits[i] += counts[i * net + j];
      hits[j] += counts[i * net + j];
    }
  }
  for (std::size_t i = 0; i < net; ++i) {
    require(hits[i] > 0, ErrorCode::DegenerateNet, "net cell " + std::to_string(i) + " received no samples");
  }

  std::vector<std::string> labels;
  for (std::size_t i = 0; i < net; ++i) labels.push_back(cell_label(i, net));
  std::vector<Edge> edges;
  const double total = static_cast<double>(samples);
  for (std::size_t i = 0; i < net; ++i) {
    for (std::size_t j = i; j < net; ++j) {
      const long c = i == j ? counts[i * net + i] : counts[i * net + j] + counts[j * net + i];
      if (c == 0) continue;
      const double w = static_cast<double>(c) / total;
      out.max_weight_stderr = std::max(out.max_weight_stderr, std::sqrt(w * (1.0 - w) / total));
      edges.push_back({i, j, w});
    }
  }
  auto g = normalize_weights(WeightedGraph::from_indexed_edges(std::move(labels), std::move(edges), true));
  g = split_vertices(g, static_cast<std::size_t>(p.split));
  auto removed = remove_self_loops(g);
  out.graph = std::move(removed.graph);
  out.w_loops = removed.w_loops;

  out.cell_of_vertex.resize(out.graph.vertex_count());
  for (std::size_t v = 0; v < out.graph.vertex_count(); ++v) {
    const auto& l = out.graph.label(v);
    const auto hash = l.find('#');
    out.cell_of_vertex[v] = std::stoul(l.substr(1, hash == std::string::npos ? std::string::npos : hash - 1));
  }
  return out;
}

/// The assignment sending every vertex to its own net centre.
inline UnitVectorAssignment center_assignment(const GaussianGraph& gg) {
  RowMatrix rows(static_cast<Eigen::Index>(gg.graph.vertex_count()), gg.centers.cols());
  for (std::size_t v = 0; v < gg.cell_of_vertex.size(); ++v) {
    rows.row(static_cast<Eigen::Index>(v)) = gg.centers.row(static_cast<Eigen::Index>(gg.cell_of_vertex[v]));
  }
  return UnitVectorAssignment::from_rows(gg.graph.labels(), std::move(rows));
}

// ---------------------------------------------------------------------------
// Unique Games

struct UGConstraint {
  std::size_t u = 0;          ///< index into left
  std::size_t v = 0;          ///< index into right
  std::vector<int> pi;        ///< pi_{u->v}, 0-based bijection on {0..M-1}
};

class UGInstance {
 public:
  UGInstance(std::vector<std::string> left, std::vector<std::string> right, int labels,
             std::vector<UGConstraint> constraints)
      : left_(std::move(left)), right_(std::move(right)), labels_(labels), constraints_(std::move(constraints)) {
    require(labels_ >= 1, ErrorCode::InvalidArgument, "UG instance needs M >= 1");
    std::unordered_map<std::string, int> seen;
    for (const auto& l : left_) require(seen.emplace(l, 0).second, ErrorCode::InvalidArgument, "duplicate vertex " + l);
    for (const auto& r : right_) require(seen.emplace(r, 1).second, ErrorCode::InvalidArgument, "duplicate vertex " + r);
    for (const auto& c : constraints_) {
      require(c.u < left_.size() && c.v < right_.size(), ErrorCode::MissingVertex, "constraint endpoint out of range");
      require(static_cast<int>(c.pi.size()) == labels_, ErrorCode::InvalidArgument, "permutation has wrong length");
      std::vector<int> sorted = c.pi;
      std::sort(sorted.begin(), sorted.end());
      for (int i = 0; i < labels_; ++i) {
        require(sorted[static_cast<std::size_t>(i)] == i, ErrorCode::InvalidArgument, "constraint map is not a bijection");
      }
    }
  }

  const std::vector<std::string>& left() const { return left_; }
  const std::vector<std::string>& right() const { return right_; }
  int label_count() const { return labels_; }
  const std::vector<UGConstraint>& constraints() const { return constraints_; }

  /// Constraint indices incident to each left vertex.
  std::vector<std::vector<std::size_t>> left_neighborhoods() const {
    std::vector<std::vector<std::size_t>> nb(left_.size());
    for (std::size_t e = 0; e < constraints_.size(); ++e) nb[constraints_[e].u].push_back(e);
    return nb;
  }

  static std::vector<int> inverse(const std::vector<int>& pi) {
    std::vector<int> inv(pi.size());
    for (std::size_t i = 0; i < pi.size(); ++i) inv[static_cast<std::size_t>(pi[i])] = static_cast<int>(i);
    return inv;
  }

 private:
  std::vector<std::string> left_;
  std::vector<std::string> right_;
  int labels_ = 1;
  std::vector<UGConstraint> constraints_;
};

/// Labels (0-based) for every left and right vertex, keyed by vertex name.
using UGLabeling = std::map<std::string, int>;

/// Fraction of constraints with pi_{u->v}(L(u)) = L(v).
inline double ug_value(const UGInstance& inst, const UGLabeling& labeling) {
  require(!inst.constraints().empty(), ErrorCode::InvalidArgument, "instance has no constraints");
  auto label_of = [&](const std::string& name) {
    auto it = labeling.find(name);
    require(it != labeling.end(), ErrorCode::MissingVertex, "labeling misses vertex " + name);
    require(it->second >= 0 && it->second < inst.label_count(), ErrorCode::InvalidArgument, "label out of range");
    return it->second;
  };
  std::size_t satisfied = 0;
  for (const auto& c : inst.constraints()) {
    if (c.pi[static_cast<std::size_t>(label_of(inst.left()[c.u]))] == label_of(inst.right()[c.v])) ++satisfied;
  }
  return static_cast<double>(satisfied) / static_cast<double>(inst.constraints().size());
}

/// (x o sigma)_i = x_{sigma(i)} on bitmask-encoded strings.
inline std::uint32_t permute_mask(std::uint32_t x, const std::vector<int>& sigma) {
  std::uint32_t out = 0;
  for (std::size_t i = 0; i < sigma.size(); ++i) {
    if (x & (1u << sigma[i])) out |= 1u << i;
  }
  return out;
}

inline std::string ug_vertex_label(const std::string& v, std::uint32_t mask, int labels) {
  return v + ":" + cube_label(mask, labels);
}

/// Exact edge distribution of the reduction: uniform u in U, independent
/// uniform neighbours v, w of u, rho-correlated (x, y) (conditioned on x != y
/// when loops is false), edge {(v, x o pi_{v->u}), (w, y o pi_{w->u})}.
inline GapInstance ug_reduction_graph(const UGInstance& inst, double rho, bool loops) {
  const int m = inst.label_count();
  require(m <= kMaxUgLabels, ErrorCode::LabelTooLarge, "UG reduction limited to M <= " + std::to_string(kMaxUgLabels));
  require(rho >= -1.0 && rho <= 1.0, ErrorCode::DomainError, "rho must lie in [-1, 1]");
  const auto neighborhoods = inst.left_neighborhoods();
  for (std::size_t u = 0; u < neighborhoods.size(); ++u) {
    require(!neighborhoods[u].empty(), ErrorCode::InvalidArgument, "left vertex " + inst.left()[u] + " has no neighbour");
  }
  const std::uint32_t cube = 1u << m;
  const double p_equal = std::pow(0.5 + 0.5 * rho, m);
  require(loops || p_equal < 1.0, ErrorCode::AllLoops, "rho = 1 leaves no x != y pairs");
  const double condition = loops ? 1.0 : 1.0 / (1.0 - p_equal);
  std::vector<double> pair_prob(static_cast<std::size_t>(m) + 1);
  for (int d = 0; d <= m; ++d) pair_prob[static_cast<std::size_t>(d)] = correlated_pair_probability(m, rho, d) * condition;

  std::vector<std::string> labels;
  labels.reserve(inst.right().size() * cube);
  for (const auto& v : inst.right()) {
    for (std::uint32_t x = 0; x < cube; ++x) labels.push_back(ug_vertex_label(v, x, m));
  }

  std::unordered_map<std::uint64_t, double> acc;
  const double pu = 1.0 / static_cast<double>(neighborhoods.size());
  for (const auto& nb : neighborhoods) {
    const double pvw = pu / static_cast<double>(nb.size() * nb.size());
    // pi_{v->u} for each incident constraint
    std::vector<std::vector<int>> back;
    for (std::size_t e : nb) back.push_back(UGInstance::inverse(inst.constraints()[e].pi));
    for (std::size_t a = 0; a < nb.size(); ++a) {
      for (std::size_t b = 0; b < nb.size(); ++b) {
        const std::uint64_t va = inst.constraints()[nb[a]].v;
        const std::uint64_t vb = inst.constraints()[nb[b]].v;
        for (std::uint32_t x = 0; x < cube; ++x) {
          const std::uint32_t px = permute_mask(x, back[a]);
          for (std::uint32_t y = 0; y < cube; ++y) {
            if (!loops && x == y) continue;
            const double p = pair_prob[static_cast<std::size_t>(std::popcount(x ^ y))];
            if (p == 0.0) continue;
            std::uint64_t i = va * cube + px;
            std::uint64_t j = vb * cube + permute_mask(y, back[b]);
            if (j < i) std::swap(i, j);
            acc[(i << 32) | j] += pvw * p;
          }
        }
      }
    }
  }
  std::vector<Edge> edges;
  edges.reserve(acc.size());
  for (const auto& [key, w] : acc) edges.push_back({key >> 32, key & 0xffffffffULL, w});
  auto g = normalize_weights(WeightedGraph::from_indexed_edges(std::move(labels), std::move(edges), true));
  return {std::move(g), loops ? 0.0 : p_equal};
}

/// Product assignment f_v(x) = (x_{L(v)}, 0, 0) on the reduction graph.
inline UnitVectorAssignment ug_dictator_assignment(const UGInstance& inst, const UGLabeling& labeling) {
  const int m = inst.label_count();
  const std::uint32_t cube = 1u << m;
  std::vector<std::string> labels;
  RowMatrix rows(static_cast<Eigen::Index>(inst.right().size() * cube), 3);
  rows.setZero();
  Eigen::Index r = 0;
  for (const auto& v : inst.right()) {
    auto it = labeling.find(v);
    require(it != labeling.end(), ErrorCode::MissingVertex, "labeling misses vertex " + v);
    for (std::uint32_t x = 0; x < cube; ++x, ++r) {
      labels.push_back(ug_vertex_label(v, x, m));
      rows(r, 0) = cube_coordinate(x, it->second);
    }
  }
  return UnitVectorAssignment(std::move(labels), std::move(rows));
}

// "qmclab-ug v1" text format

inline constexpr const char* kUgHeader = "qmclab-ug v1";

inline void write_ug(std::ostream& os, const UGInstance& inst) {
  os << kUgHeader << '\n' << "labels " << inst.label_count() << '\n';
  os << "left " << inst.left().size() << '\n';
  for (const auto& l : inst.left()) os << l << '\n';
  os << "right " << inst.right().size() << '\n';
  for (const auto& r : inst.right()) os << r << '\n';
  for (const auto& c : inst.constraints()) {
    os << inst.left()[c.u] << ' ' << inst.right()[c.v];
    for (int p : c.pi) os << ' ' << p + 1;
    os << '\n';
  }
}

inline UGInstance read_ug(std::istream& is) {
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) lines.push_back(line);
  }
  std::size_t pos = 0;
  auto next = [&](const char* what) -> const std::string& {
    require(pos < lines.size(), ErrorCode::ParseError, std::string("unexpected end of input, expected ") + what);
    return lines[pos++];
  };
  require(next("header") == kUgHeader, ErrorCode::ParseError, "unsupported UG header");
  auto keyed = [&](const std::string& key) {
    std::istringstream ss(next(key.c_str()));
    std::string k;
    long long value = -1;
    ss >> k >> value;
    require(k == key && value >= 0 && ss.eof(), ErrorCode::ParseError, "expected '" + key + " <count>'");
    return static_cast<std::size_t>(value);
  };
  const int m = static_cast<int>(keyed("labels"));
  std::vector<std::string> left, right;
  const std::size_t nu = keyed("left");
  for (std::size_t i = 0; i < nu; ++i) left.push_back(next("left vertex"));
  const std::size_t nv = keyed("right");
  for (std::size_t i = 0; i < nv; ++i) right.push_back(next("right vertex"));
  if (pos < lines.size() && lines[pos].rfind("edges ", 0) == 0) ++pos;

  std::unordered_map<std::string, std::size_t> li, ri;
  for (std::size_t i = 0; i < left.size(); ++i) li.emplace(left[i], i);
  for (std::size_t i = 0; i < right.size(); ++i) ri.emplace(right[i], i);
  std::vector<UGConstraint> constraints;
  while (pos < lines.size()) {
    std::istringstream ss(lines[pos++]);
    std::string u, v;
    require(static_cast<bool>(ss >> u >> v), ErrorCode::ParseError, "malformed UG edge line");
    auto iu = li.find(u);
    auto iv = ri.find(v);
    require(iu != li.end() && iv != ri.end(), ErrorCode::ParseError, "UG edge must join a left and a right vertex");
    UGConstraint c{iu->second, iv->second, {}};
    int p = 0;
    while (ss >> p) c.pi.push_back(p - 1);
    require(ss.eof(), ErrorCode::ParseError, "non-numeric permutation entry");
    constraints.push_back(std::move(c));
  }
  return UGInstance(std::move(left), std::move(right), m, std::move(constraints));
}

// ---------------------------------------------------------------------------
// Fixtures

enum class StandardKind { SingleEdge, Complete, Cycle };

inline std::string vertex_name(std::size_t i) { return "v" + std::to_string(i + 1); }

inline WeightedGraph standard_graph(StandardKind kind, std::size_t n = 0) {
  if (kind == StandardKind::SingleEdge) {
    return normalize_weights(WeightedGraph::from_indexed_edges({"a", "b"}, {{0, 1, 1.0}}));
  }
  require(n >= 3, ErrorCode::InvalidArgument, "complete and cycle graphs need n >= 3");
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < n; ++i) labels.push_back(vertex_name(i));
  std::vector<Edge> edges;
  if (kind == StandardKind::Complete) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) edges.push_back({i, j, 1.0});
  } else {
    for (std::size_t i = 0; i < n; ++i) edges.push_back({i, (i + 1) % n, 1.0});
  }
  return normalize_weights(WeightedGraph::from_indexed_edges(std::move(labels), std::move(edges)));
}

/// Erdos-Renyi style graph with random positive weights; resampled until it has an edge.
inline WeightedGraph random_graph(std::size_t n, double edge_probability, std::uint64_t seed) {
  Rng rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < n; ++i) labels.push_back(vertex_name(i));
  std::vector<Edge> edges;
  while (edges.empty()) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        if (unit(rng) < edge_probability) edges.push_back({i, j, 0.1 + unit(rng)});
  }
  return normalize_weights(WeightedGraph::from_indexed_edges(std::move(labels), std::move(edges)));
}

/// Disjoint union with vertex sets prefixed "L." / "R." and the two edge
/// distributions mixed with weights (lambda, 1 - lambda).
inline WeightedGraph disjoint_union(const WeightedGraph& a, const WeightedGraph& b, double lambda) {
  std::vector<std::string> labels;
  for (const auto& l : a.labels()) labels.push_back("L." + l);
  for (const auto& l : b.labels()) labels.push_back("R." + l);
  std::vector<Edge> edges;
  for (const auto& e : a.edges()) edges.push_back({e.u, e.v, lambda * e.w});
  const std::size_t off = a.vertex_count();
  for (const auto& e : b.edges()) edges.push_back({e.u + off, e.v + off, (1.0 - lambda) * e.w});
  return normalize_weights(WeightedGraph::from_indexed_edges(std::move(labels), std::move(edges),
                                                             a.allows_loops() || b.allows_loops()));
}

}  // namespace qmclab
