#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sep/coding_tree.hpp"
#include "sep/graph.hpp"

namespace sep {

/// Hard cluster assignment for one hierarchy level: a sparse 0/1 matrix
/// of shape rows x cols with exactly one 1 per column, stored as the
/// cluster index of each column entity.
struct ClusterAssignment {
  int level = 1;         // 1..k, counted from the leaves upward
  std::size_t rows = 0;  // clusters (coarse side)
  std::size_t cols = 0;  // entities one level below (fine side)
  std::vector<std::uint32_t> cluster_of;  // size cols

  /// Column lists per cluster, ascending; the counting-sort layout the
  /// kernels iterate.
  std::vector<std::vector<std::uint32_t>> members() const;

  std::vector<std::vector<double>> dense() const;  // small/test use
};

/// General sparse matrix in CSR form; adjacency matrices store both
/// triangles plus any diagonal, so sum() is the full-matrix entry sum.
struct CsrMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::size_t> offsets;  // rows + 1
  std::vector<std::uint32_t> col_idx;
  std::vector<double> vals;

  static CsrMatrix from_graph(const Graph& g);

  std::size_t nnz() const { return vals.size(); }
  double sum() const;
  double entry(std::size_t i, std::size_t j) const;  // O(log row nnz)
  bool symmetric(double tol) const;
  std::vector<std::vector<double>> dense() const;
};

enum class Aggregation { Sum, Mean };

/// Adjacency plus per-node features at one hierarchy level.
struct PoolingLevel {
  CsrMatrix adjacency;
  FeatureMatrix features;
};

/// Reads one assignment matrix per level off a completed coding tree
/// (every leaf at depth k). Level-0 entities are the graph nodes in id
/// order; coarser levels order clusters by their minimum leaf id.
std::vector<ClusterAssignment> assignments_from_tree(const CodingTree& tree);

// Coarsening algebra. Pooling computes S*A*S^T and S*H (Mean row-normalizes
// S for the feature product only); unpooling computes S^T*A*S and S^T*H,
// which broadcasts every cluster row back to its members.

CsrMatrix pool_adjacency(const CsrMatrix& a, const ClusterAssignment& s);
CsrMatrix pool_adjacency_serial(const CsrMatrix& a, const ClusterAssignment& s);
FeatureMatrix pool_features(const FeatureMatrix& h, const ClusterAssignment& s,
                            Aggregation agg = Aggregation::Sum);
FeatureMatrix pool_features_serial(const FeatureMatrix& h, const ClusterAssignment& s,
                                   Aggregation agg = Aggregation::Sum);
CsrMatrix unpool_adjacency(const CsrMatrix& a, const ClusterAssignment& s);
FeatureMatrix unpool_features(const FeatureMatrix& h, const ClusterAssignment& s);
FeatureMatrix unpool_features_serial(const FeatureMatrix& h, const ClusterAssignment& s);

PoolingLevel pool(const PoolingLevel& level, const ClusterAssignment& s,
                  Aggregation agg = Aggregation::Sum);
PoolingLevel unpool(const PoolingLevel& level, const ClusterAssignment& s);

/// Pools features through the given levels and broadcasts them back.
FeatureMatrix round_trip_features(const FeatureMatrix& x,
                                  std::span<const ClusterAssignment> levels,
                                  Aggregation agg);

double mean_squared_error(const FeatureMatrix& a, const FeatureMatrix& b);

/// Builds the height-k coding tree, round-trips the features through the
/// non-root hierarchy levels (S_1..S_{k-1}), and reports the MSE against
/// the input. With Mean aggregation every node comes back as its cluster
/// centroid.
double reconstruct_metric(const Graph& g, const FeatureMatrix& features, int k,
                          Aggregation agg);

// Exports, documented byte-for-byte in the README.
std::string format_assignment_csv(const ClusterAssignment& s);
std::string format_assignment_matrix_market(const ClusterAssignment& s);
std::string format_pooled_edge_list(const CsrMatrix& a);

}  // namespace sep
