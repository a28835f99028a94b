#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sep/errors.hpp"

namespace sep {

using NodeId = std::uint32_t;

/// One undirected edge. Graphs keep edges canonical: u < v, unique pairs.
struct Edge {
  NodeId u = 0;
  NodeId v = 0;
  double w = 1.0;
};

/// Immutable undirected weighted graph with degree and volume caches.
///
/// Construction strips self-loops and sums duplicate weights, so that
/// total_volume() == sum of weighted degrees == 2 * sum of edge weights.
/// Node ids are dense 0..n-1; isolated nodes (degree 0) are permitted.
class Graph {
public:
  Graph() = default;

  /// Builds a graph from raw edges. Self-loops are dropped, parallel
  /// edges have their weights summed, negative weights are rejected.
  static Graph from_edges(std::size_t node_count, std::vector<Edge> edges);

  std::size_t node_count() const { return node_count_; }
  std::size_t edge_count() const { return edges_.size(); }
  std::span<const Edge> edges() const { return edges_; }

  double degree(NodeId v) const { return degree_[v]; }
  std::span<const double> degrees() const { return degree_; }
  double total_volume() const { return total_volume_; }

  bool has_isolated_nodes() const { return isolated_count_ > 0; }
  std::size_t isolated_count() const { return isolated_count_; }

  /// Neighbors of u in ascending id order, paired with neighbor_weights(u).
  std::span<const NodeId> neighbors(NodeId u) const {
    return {adj_nodes_.data() + adj_offsets_[u], adj_offsets_[u + 1] - adj_offsets_[u]};
  }
  std::span<const double> neighbor_weights(NodeId u) const {
    return {adj_weights_.data() + adj_offsets_[u], adj_offsets_[u + 1] - adj_offsets_[u]};
  }

  bool connected() const;

  bool operator==(const Graph& other) const {
    return node_count_ == other.node_count_ && edges_ == other.edges_;
  }

private:
  std::size_t node_count_ = 0;
  std::vector<Edge> edges_;  // sorted by (u, v), u < v
  std::vector<double> degree_;
  double total_volume_ = 0.0;
  std::size_t isolated_count_ = 0;

  // CSR adjacency, both directions of every edge.
  std::vector<std::size_t> adj_offsets_;
  std::vector<NodeId> adj_nodes_;
  std::vector<double> adj_weights_;
};

inline bool operator==(const Edge& a, const Edge& b) {
  return a.u == b.u && a.v == b.v && a.w == b.w;
}

/// Dense row-major per-node feature matrix; rows track graph nodes.
class FeatureMatrix {
public:
  FeatureMatrix() = default;
  FeatureMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& at(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double at(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }

  std::span<const double> data() const { return data_; }

  bool operator==(const FeatureMatrix& other) const = default;

private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

}  // namespace sep
