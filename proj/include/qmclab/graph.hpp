#pragma once

// Weighted interaction graphs whose edge weights form a probability
// distribution, plus the structural transforms used by the gap constructions.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <istream>
#include <numeric>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "qmclab/error.hpp"

namespace qmclab {

/// Neumaier-compensated running sum; large instances add up ~10^6 weights.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    carry_ += std::abs(sum_) >= std::abs(x) ? (sum_ - t) + x : (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + carry_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

struct Edge {
  std::size_t u = 0;
  std::size_t v = 0;
  double w = 0.0;
};

struct LabeledEdge {
  std::string u;
  std::string v;
  double w = 0.0;
};

inline constexpr double kNormalizationTolerance = 1e-12;

/// Undirected weighted graph with opaque string labels. Immutable once built.
///
/// Edges are stored once, in canonical orientation (lexicographically smaller
/// label first) and sorted by (label(u), label(v)). Parallel edges are merged
/// by adding weights; zero-weight edges are dropped.
class WeightedGraph {
 public:
  WeightedGraph() = default;

  static WeightedGraph from_indexed_edges(std::vector<std::string> labels, std::vector<Edge> edges,
                                          bool allow_loops = false) {
    WeightedGraph g;
    g.labels_ = std::move(labels);
    g.allow_loops_ = allow_loops;
    g.build_index();
    g.canonicalize(std::move(edges));
    return g;
  }

  static WeightedGraph from_labeled_edges(std::vector<std::string> labels,
                                          const std::vector<LabeledEdge>& edges,
                                          bool allow_loops = false) {
    WeightedGraph g;
    g.labels_ = std::move(labels);
    g.allow_loops_ = allow_loops;
    g.build_index();
    std::vector<Edge> indexed;
    indexed.reserve(edges.size());
    for (const auto& e : edges) {
      auto u = g.index_of(e.u);
      auto v = g.index_of(e.v);
      require(u.has_value(), ErrorCode::MissingVertex, "unknown vertex '" + e.u + "'");
      require(v.has_value(), ErrorCode::MissingVertex, "unknown vertex '" + e.v + "'");
      indexed.push_back({*u, *v, e.w});
    }
    g.canonicalize(std::move(indexed));
    return g;
  }

  std::size_t vertex_count() const { return labels_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::string& label(std::size_t i) const { return labels_.at(i); }
  const std::vector<Edge>& edges() const { return edges_; }
  bool allows_loops() const { return allow_loops_; }
  bool is_normalized() const { return normalized_; }

  std::optional<std::size_t> index_of(const std::string& label) const {
    auto it = index_.find(label);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  double total_weight() const {
    CompensatedSum s;
    for (const auto& e : edges_) s.add(e.w);
    return s.value();
  }

  bool has_loops() const {
    return std::any_of(edges_.begin(), edges_.end(), [](const Edge& e) { return e.u == e.v; });
  }

  double weight_between(const std::string& a, const std::string& b) const {
    auto ia = index_of(a);
    auto ib = index_of(b);
    if (!ia || !ib) return 0.0;
    std::size_t u = *ia, v = *ib;
    if (rank_[v] < rank_[u]) std::swap(u, v);
    auto it = std::lower_bound(edges_.begin(), edges_.end(), std::make_pair(rank_[u], rank_[v]),
                               [this](const Edge& e, const std::pair<std::size_t, std::size_t>& key) {
                                 return std::make_pair(rank_[e.u], rank_[e.v]) < key;
                               });
    if (it != edges_.end() && it->u == u && it->v == v) return it->w;
    return 0.0;
  }

 private:
  void build_index() {
    index_.reserve(labels_.size());
    for (std::size_t i = 0; i < labels_.size(); ++i) {
      require(!labels_[i].empty(), ErrorCode::InvalidArgument, "empty vertex label");
      auto [it, inserted] = index_.emplace(labels_[i], i);
      require(inserted, ErrorCode::InvalidArgument, "duplicate vertex label '" + labels_[i] + "'");
    }
    std::vector<std::size_t> order(labels_.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [this](std::size_t a, std::size_t b) { return labels_[a] < labels_[b]; });
    rank_.assign(labels_.size(), 0);
    for (std::size_t r = 0; r < order.size(); ++r) rank_[order[r]] = r;
  }

  void canonicalize(std::vector<Edge> edges) {
    const std::size_t n = labels_.size();
    for (auto& e : edges) {
      require(e.u < n && e.v < n, ErrorCode::MissingVertex, "edge endpoint out of range");
      require(std::isfinite(e.w) && e.w >= 0.0, ErrorCode::InvalidArgument,
              "edge weights must be finite and non-negative");
      require(allow_loops_ || e.u != e.v, ErrorCode::InvalidArgument,
              "self-loop on '" + labels_[e.u] + "' without allow_loops");
      if (rank_[e.v] < rank_[e.u]) std::swap(e.u, e.v);
    }
    std::sort(edges.begin(), edges.end(), [this](const Edge& a, const Edge& b) {
      return std::make_pair(rank_[a.u], rank_[a.v]) < std::make_pair(rank_[b.u], rank_[b.v]);
    });
    edges_.clear();
    edges_.reserve(edges.size());
    for (const auto& e : edges) {
      if (!edges_.empty() && edges_.back().u == e.u && edges_.back().v == e.v) {
        edges_.back().w += e.w;
      } else {
        edges_.push_back(e);
      }
    }
    std::erase_if(edges_, [](const Edge& e) { return e.w == 0.0; });
    normalized_ = !edges_.empty() && std::abs(total_weight() - 1.0) <= kNormalizationTolerance;
  }

  friend WeightedGraph normalize_weights(const WeightedGraph& g);

  std::vector<std::string> labels_;
  std::vector<std::size_t> rank_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<Edge> edges_;
  bool allow_loops_ = false;
  bool normalized_ = false;
};

/// Rescales weights to sum to one. The rounding residual is folded into the
/// last edge in canonical order.
inline WeightedGraph normalize_weights(const WeightedGraph& g) {
  const double total = g.total_weight();
  require(!g.edges().empty() && total > 0.0, ErrorCode::EmptyGraph, "no positive-weight edge");
  WeightedGraph out = g;
  CompensatedSum partial;
  for (std::size_t i = 0; i + 1 < out.edges_.size(); ++i) {
    out.edges_[i].w /= total;
    partial.add(out.edges_[i].w);
  }
  out.edges_.back().w = 1.0 - partial.value();
  out.normalized_ = true;
  return out;
}

struct LoopRemoval {
  WeightedGraph graph;
  double w_loops = 0.0;
};

inline LoopRemoval remove_self_loops(const WeightedGraph& g) {
  require(g.is_normalized(), ErrorCode::InvalidArgument, "remove_self_loops needs a normalized graph");
  CompensatedSum loop_sum;
  std::vector<Edge> kept;
  kept.reserve(g.edge_count());
  for (const auto& e : g.edges()) {
    if (e.u == e.v) {
      loop_sum.add(e.w);
    } else {
      kept.push_back(e);
    }
  }
  const double w_loops = loop_sum.value();
  if (w_loops == 0.0) return {g, 0.0};
  require(!kept.empty() && w_loops < 1.0, ErrorCode::AllLoops, "every edge is a self-loop");
  const double scale = 1.0 / (1.0 - w_loops);
  for (auto& e : kept) e.w *= scale;
  auto out = WeightedGraph::from_indexed_edges(g.labels(), std::move(kept), g.allows_loops());
  return {normalize_weights(out), w_loops};
}

/// Replaces every vertex u by copies u#1..u#M and every edge by the M^2 edges
/// between copies, each carrying w/M^2.
inline WeightedGraph split_vertices(const WeightedGraph& g, std::size_t copies) {
  require(copies >= 1, ErrorCode::InvalidArgument, "split_vertices needs M >= 1");
  require(g.is_normalized(), ErrorCode::InvalidArgument, "split_vertices needs a normalized graph");
  if (copies == 1) return g;
  std::vector<std::string> labels;
  labels.reserve(g.vertex_count() * copies);
  for (const auto& l : g.labels()) {
    for (std::size_t i = 1; i <= copies; ++i) labels.push_back(l + "#" + std::to_string(i));
  }
  const double share = 1.0 / static_cast<double>(copies * copies);
  std::vector<Edge> edges;
  edges.reserve(g.edge_count() * copies * copies);
  for (const auto& e : g.edges()) {
    for (std::size_t i = 0; i < copies; ++i) {
      for (std::size_t j = 0; j < copies; ++j) {
        edges.push_back({e.u * copies + i, e.v * copies + j, e.w * share});
      }
    }
  }
  return normalize_weights(
      WeightedGraph::from_indexed_edges(std::move(labels), std::move(edges), g.allows_loops()));
}

/// p_u = half the probability that a random edge touches u.
inline std::vector<double> vertex_marginals(const WeightedGraph& g) {
  std::vector<double> p(g.vertex_count(), 0.0);
  for (const auto& e : g.edges()) {
    p[e.u] += 0.5 * e.w;
    p[e.v] += 0.5 * e.w;
  }
  return p;
}

struct GraphStats {
  double p_max = 0.0;
  double a_max = 0.0;
  std::size_t n = 0;
};

inline GraphStats bh_stats(const WeightedGraph& g) {
  require(g.is_normalized(), ErrorCode::InvalidArgument, "bh_stats needs a normalized graph");
  require(!g.has_loops(), ErrorCode::InvalidArgument, "bh_stats needs a loop-free graph");
  const auto p = vertex_marginals(g);
  GraphStats s;
  s.n = g.vertex_count();
  s.p_max = p.empty() ? 0.0 : *std::max_element(p.begin(), p.end());
  for (const auto& e : g.edges()) {
    // A_{u,v} = Pr[v | u] = w_uv / (2 p_u)
    s.a_max = std::max(s.a_max, e.w / (2.0 * p[e.u]));
    s.a_max = std::max(s.a_max, e.w / (2.0 * p[e.v]));
  }
  return s;
}

/// Additive gap between the product-state value and the maximum energy
/// guaranteed for graphs with the given statistics.
inline double bh_error_bound(const GraphStats& s) {
  return 20.0 * std::pow(static_cast<double>(s.n) * s.a_max * s.p_max, 1.0 / 8.0) + s.p_max;
}

// ---------------------------------------------------------------------------
// Text format "qmclab-graph v1"

inline constexpr const char* kGraphHeader = "qmclab-graph v1";

inline std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline void write_graph(std::ostream& os, const WeightedGraph& g) {
  os << kGraphHeader << '\n';
  os << "vertices " << g.vertex_count() << '\n';
  for (const auto& l : g.labels()) os << l << '\n';
  os << "edges " << g.edge_count() << '\n';
  for (const auto& e : g.edges()) {
    os << g.label(e.u) << ' ' << g.label(e.v) << ' ' << format_double(e.w) << '\n';
  }
}

inline WeightedGraph read_graph(std::istream& is, bool allow_loops = true) {
  std::string line;
  auto next_line = [&](const char* what) {
    while (std::getline(is, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!line.empty()) return;
    }
    throw Error(ErrorCode::ParseError, std::string("unexpected end of input, expected ") + what);
  };
  next_line("header");
  require(line == kGraphHeader, ErrorCode::ParseError, "unsupported graph header '" + line + "'");

  auto read_count = [&](const std::string& keyword) {
    next_line(keyword.c_str());
    std::istringstream ss(line);
    std::string key;
    long long count = -1;
    ss >> key >> count;
    require(key == keyword && count >= 0 && ss.eof(), ErrorCode::ParseError,
            "expected '" + keyword + " <count>', got '" + line + "'");
    return static_cast<std::size_t>(count);
  };

  const std::size_t nv = read_count("vertices");
  std::vector<std::string> labels;
  labels.reserve(nv);
  for (std::size_t i = 0; i < nv; ++i) {
    next_line("vertex label");
    require(line.find_first_of(" \t") == std::string::npos, ErrorCode::ParseError,
            "vertex labels may not contain whitespace: '" + line + "'");
    labels.push_back(line);
  }
  const std::size_t ne = read_count("edges");
  std::vector<LabeledEdge> edges;
  edges.reserve(ne);
  for (std::size_t i = 0; i < ne; ++i) {
    next_line("edge");
    std::istringstream ss(line);
    LabeledEdge e;
    require(static_cast<bool>(ss >> e.u >> e.v >> e.w), ErrorCode::ParseError,
            "malformed edge line '" + line + "'");
    std::string rest;
    require(!(ss >> rest), ErrorCode::ParseError, "trailing tokens in edge line '" + line + "'");
    edges.push_back(std::move(e));
  }
  return WeightedGraph::from_labeled_edges(std::move(labels), edges, allow_loops);
}

}  // namespace qmclab
