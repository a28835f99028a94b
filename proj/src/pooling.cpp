#include "sep/pooling.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "sep/graph_io.hpp"
#include "sep/tree_builder.hpp"

namespace sep {

std::vector<std::vector<std::uint32_t>> ClusterAssignment::members() const {
  std::vector<std::vector<std::uint32_t>> out(rows);
  for (std::uint32_t j = 0; j < cols; ++j) out[cluster_of[j]].push_back(j);
  return out;
}

std::vector<std::vector<double>> ClusterAssignment::dense() const {
  std::vector<std::vector<double>> m(rows, std::vector<double>(cols, 0.0));
  for (std::uint32_t j = 0; j < cols; ++j) m[cluster_of[j]][j] = 1.0;
  return m;
}

CsrMatrix CsrMatrix::from_graph(const Graph& g) {
  CsrMatrix a;
  a.rows = a.cols = g.node_count();
  a.offsets.resize(a.rows + 1, 0);
  for (std::size_t u = 0; u < a.rows; ++u)
    a.offsets[u + 1] = a.offsets[u] + g.neighbors(static_cast<NodeId>(u)).size();
  a.col_idx.reserve(a.offsets.back());
  a.vals.reserve(a.offsets.back());
  for (std::size_t u = 0; u < a.rows; ++u) {
    auto nbrs = g.neighbors(static_cast<NodeId>(u));
    auto wts = g.neighbor_weights(static_cast<NodeId>(u));
    a.col_idx.insert(a.col_idx.end(), nbrs.begin(), nbrs.end());
    a.vals.insert(a.vals.end(), wts.begin(), wts.end());
  }
  return a;
}

double CsrMatrix::sum() const {
  double s = 0.0;
  for (double v : vals) s += v;
  return s;
}

double CsrMatrix::entry(std::size_t i, std::size_t j) const {
  auto begin = col_idx.begin() + static_cast<std::ptrdiff_t>(offsets[i]);
  auto end = col_idx.begin() + static_cast<std::ptrdiff_t>(offsets[i + 1]);
  auto it = std::lower_bound(begin, end, static_cast<std::uint32_t>(j));
  if (it == end || *it != j) return 0.0;
  return vals[static_cast<std::size_t>(it - col_idx.begin())];
}

bool CsrMatrix::symmetric(double tol) const {
  if (rows != cols) return false;
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t e = offsets[i]; e < offsets[i + 1]; ++e)
      if (std::abs(vals[e] - entry(col_idx[e], i)) > tol) return false;
  return true;
}

std::vector<std::vector<double>> CsrMatrix::dense() const {
  std::vector<std::vector<double>> m(rows, std::vector<double>(cols, 0.0));
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t e = offsets[i]; e < offsets[i + 1]; ++e) m[i][col_idx[e]] += vals[e];
  return m;
}

std::vector<ClusterAssignment> assignments_from_tree(const CodingTree& tree) {
  const int k = tree.height();
  std::vector<int> depth = tree.depths();

  std::vector<std::vector<int>> by_depth(k + 1);
  for (std::size_t v = 0; v < tree.arena_size(); ++v) {
    if (!tree.alive(static_cast<int>(v))) continue;
    if (depth[v] > k) throw StructuralError("assignments: node deeper than tree height");
    by_depth[depth[v]].push_back(static_cast<int>(v));
    if (tree.is_leaf(static_cast<int>(v)) && depth[v] != k)
      throw StructuralError("assignments: leaves sit at unequal depths; run the full "
                            "construction (or fill) first");
  }

  // Entity order per depth: leaves by graph id, clusters by min leaf id.
  std::vector<std::vector<int>> index_of(k + 1);
  for (int d = 0; d <= k; ++d) {
    auto& level = by_depth[d];
    if (d == k) {
      std::sort(level.begin(), level.end(), [&](int a, int b) {
        return tree.graph_node(a) < tree.graph_node(b);
      });
    } else {
      std::sort(level.begin(), level.end(),
                [&](int a, int b) { return tree.min_leaf(a) < tree.min_leaf(b); });
    }
    index_of[d].assign(tree.arena_size(), -1);
    for (std::size_t i = 0; i < level.size(); ++i) index_of[d][level[i]] = static_cast<int>(i);
  }

  std::vector<ClusterAssignment> out;
  out.reserve(k);
  for (int i = 1; i <= k; ++i) {
    int fine_depth = k - i + 1;
    int coarse_depth = k - i;
    ClusterAssignment s;
    s.level = i;
    s.cols = by_depth[fine_depth].size();
    s.rows = by_depth[coarse_depth].size();
    s.cluster_of.resize(s.cols);
    for (int v : by_depth[fine_depth]) {
      int col = index_of[fine_depth][v];
      int row = index_of[coarse_depth][tree.parent(v)];
      s.cluster_of[col] = static_cast<std::uint32_t>(row);
    }
    out.push_back(std::move(s));
  }
  return out;
}

namespace {

void require(bool ok, const char* msg) {
  if (!ok) throw ShapeError(msg);
}

CsrMatrix assemble_rows(std::size_t cols,
                        std::vector<std::vector<std::pair<std::uint32_t, double>>> rows) {
  CsrMatrix out;
  out.rows = rows.size();
  out.cols = cols;
  out.offsets.resize(out.rows + 1, 0);
  for (std::size_t p = 0; p < rows.size(); ++p) out.offsets[p + 1] = out.offsets[p] + rows[p].size();
  out.col_idx.resize(out.offsets.back());
  out.vals.resize(out.offsets.back());
  for (std::size_t p = 0; p < rows.size(); ++p) {
    std::size_t base = out.offsets[p];
    for (std::size_t e = 0; e < rows[p].size(); ++e) {
      out.col_idx[base + e] = rows[p][e].first;
      out.vals[base + e] = rows[p][e].second;
    }
  }
  return out;
}

}  // namespace

CsrMatrix pool_adjacency(const CsrMatrix& a, const ClusterAssignment& s) {
  require(a.rows == a.cols, "pool: adjacency must be square");
  require(s.cols == a.rows, "pool: assignment columns must match adjacency size");
  auto members = s.members();
  std::vector<std::vector<std::pair<std::uint32_t, double>>> out_rows(s.rows);

#pragma omp parallel
  {
    std::vector<double> acc(s.rows, 0.0);
    std::vector<std::uint32_t> touched;
#pragma omp for schedule(static)
    for (long p = 0; p < static_cast<long>(s.rows); ++p) {
      touched.clear();
      for (std::uint32_t i : members[p]) {
        for (std::size_t e = a.offsets[i]; e < a.offsets[i + 1]; ++e) {
          std::uint32_t q = s.cluster_of[a.col_idx[e]];
          if (acc[q] == 0.0 && a.vals[e] != 0.0) touched.push_back(q);
          acc[q] += a.vals[e];
        }
      }
      std::sort(touched.begin(), touched.end());
      auto& row = out_rows[p];
      row.reserve(touched.size());
      for (std::uint32_t q : touched) {
        row.emplace_back(q, acc[q]);
        acc[q] = 0.0;
      }
    }
  }
  return assemble_rows(s.rows, std::move(out_rows));
}

CsrMatrix pool_adjacency_serial(const CsrMatrix& a, const ClusterAssignment& s) {
  require(a.rows == a.cols, "pool: adjacency must be square");
  require(s.cols == a.rows, "pool: assignment columns must match adjacency size");
  std::map<std::pair<std::uint32_t, std::uint32_t>, double> acc;
  for (std::size_t i = 0; i < a.rows; ++i)
    for (std::size_t e = a.offsets[i]; e < a.offsets[i + 1]; ++e)
      acc[{s.cluster_of[i], s.cluster_of[a.col_idx[e]]}] += a.vals[e];
  std::vector<std::vector<std::pair<std::uint32_t, double>>> out_rows(s.rows);
  for (const auto& [key, w] : acc) out_rows[key.first].emplace_back(key.second, w);
  return assemble_rows(s.rows, std::move(out_rows));
}

FeatureMatrix pool_features(const FeatureMatrix& h, const ClusterAssignment& s,
                            Aggregation agg) {
  require(s.cols == h.rows(), "pool: assignment columns must match feature rows");
  auto members = s.members();
  FeatureMatrix out(s.rows, h.cols());
#pragma omp parallel for schedule(static)
  for (long p = 0; p < static_cast<long>(s.rows); ++p) {
    auto row = out.row(p);
    for (std::uint32_t i : members[p]) {
      auto src = h.row(i);
      for (std::size_t c = 0; c < src.size(); ++c) row[c] += src[c];
    }
    if (agg == Aggregation::Mean && !members[p].empty())
      for (double& x : row) x /= static_cast<double>(members[p].size());
  }
  return out;
}

FeatureMatrix pool_features_serial(const FeatureMatrix& h, const ClusterAssignment& s,
                                   Aggregation agg) {
  require(s.cols == h.rows(), "pool: assignment columns must match feature rows");
  FeatureMatrix out(s.rows, h.cols());
  std::vector<std::size_t> count(s.rows, 0);
  for (std::size_t i = 0; i < h.rows(); ++i) {
    auto dst = out.row(s.cluster_of[i]);
    auto src = h.row(i);
    for (std::size_t c = 0; c < src.size(); ++c) dst[c] += src[c];
    ++count[s.cluster_of[i]];
  }
  if (agg == Aggregation::Mean)
    for (std::size_t p = 0; p < s.rows; ++p)
      if (count[p] > 0)
        for (double& x : out.row(p)) x /= static_cast<double>(count[p]);
  return out;
}

CsrMatrix unpool_adjacency(const CsrMatrix& a, const ClusterAssignment& s) {
  require(a.rows == a.cols, "unpool: adjacency must be square");
  require(s.rows == a.rows, "unpool: assignment rows must match adjacency size");
  auto members = s.members();
  std::vector<std::vector<std::pair<std::uint32_t, double>>> out_rows(s.cols);
#pragma omp parallel for schedule(static)
  for (long i = 0; i < static_cast<long>(s.cols); ++i) {
    std::uint32_t p = s.cluster_of[i];
    auto& row = out_rows[i];
    for (std::size_t e = a.offsets[p]; e < a.offsets[p + 1]; ++e)
      for (std::uint32_t j : members[a.col_idx[e]]) row.emplace_back(j, a.vals[e]);
    std::sort(row.begin(), row.end());
  }
  return assemble_rows(s.cols, std::move(out_rows));
}

FeatureMatrix unpool_features(const FeatureMatrix& h, const ClusterAssignment& s) {
  require(s.rows == h.rows(), "unpool: assignment rows must match feature rows");
  FeatureMatrix out(s.cols, h.cols());
#pragma omp parallel for schedule(static)
  for (long i = 0; i < static_cast<long>(s.cols); ++i) {
    auto src = h.row(s.cluster_of[i]);
    auto dst = out.row(i);
    std::copy(src.begin(), src.end(), dst.begin());
  }
  return out;
}

FeatureMatrix unpool_features_serial(const FeatureMatrix& h, const ClusterAssignment& s) {
  require(s.rows == h.rows(), "unpool: assignment rows must match feature rows");
  FeatureMatrix out(s.cols, h.cols());
  for (std::size_t i = 0; i < s.cols; ++i) {
    auto src = h.row(s.cluster_of[i]);
    auto dst = out.row(i);
    std::copy(src.begin(), src.end(), dst.begin());
  }
  return out;
}

PoolingLevel pool(const PoolingLevel& level, const ClusterAssignment& s, Aggregation agg) {
  return {pool_adjacency(level.adjacency, s), pool_features(level.features, s, agg)};
}

PoolingLevel unpool(const PoolingLevel& level, const ClusterAssignment& s) {
  return {unpool_adjacency(level.adjacency, s), unpool_features(level.features, s)};
}

FeatureMatrix round_trip_features(const FeatureMatrix& x,
                                  std::span<const ClusterAssignment> levels,
                                  Aggregation agg) {
  FeatureMatrix cur = x;
  for (const auto& s : levels) cur = pool_features(cur, s, agg);
  for (auto it = levels.rbegin(); it != levels.rend(); ++it) cur = unpool_features(cur, *it);
  return cur;
}

double mean_squared_error(const FeatureMatrix& a, const FeatureMatrix& b) {
  require(a.rows() == b.rows() && a.cols() == b.cols(), "mse: shape mismatch");
  if (a.rows() == 0 || a.cols() == 0) return 0.0;
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t c = 0; c < a.cols(); ++c) {
      double d = a.at(i, c) - b.at(i, c);
      s += d * d;
    }
  return s / (static_cast<double>(a.rows()) * static_cast<double>(a.cols()));
}

double reconstruct_metric(const Graph& g, const FeatureMatrix& features, int k,
                          Aggregation agg) {
  require(features.rows() == g.node_count(),
          "reconstruct: feature rows must match graph node count");
  CodingTree tree = build_coding_tree(g, k);
  auto assignments = assignments_from_tree(tree);
  std::span<const ClusterAssignment> non_root(assignments.data(), assignments.size() - 1);
  FeatureMatrix rt = round_trip_features(features, non_root, agg);
  return mean_squared_error(features, rt);
}

std::string format_assignment_csv(const ClusterAssignment& s) {
  std::string out = "level,cluster,node\n";
  for (std::uint32_t j = 0; j < s.cols; ++j) {
    out += std::to_string(s.level);
    out += ',';
    out += std::to_string(s.cluster_of[j]);
    out += ',';
    out += std::to_string(j);
    out += '\n';
  }
  return out;
}

std::string format_assignment_matrix_market(const ClusterAssignment& s) {
  std::string out = "%%MatrixMarket matrix coordinate integer general\n";
  out += std::to_string(s.rows);
  out += ' ';
  out += std::to_string(s.cols);
  out += ' ';
  out += std::to_string(s.cols);
  out += '\n';
  for (std::uint32_t j = 0; j < s.cols; ++j) {
    out += std::to_string(s.cluster_of[j] + 1);
    out += ' ';
    out += std::to_string(j + 1);
    out += " 1\n";
  }
  return out;
}

std::string format_pooled_edge_list(const CsrMatrix& a) {
  std::string out;
  for (std::size_t i = 0; i < a.rows; ++i)
    for (std::size_t e = a.offsets[i]; e < a.offsets[i + 1]; ++e) {
      if (a.col_idx[e] < i) continue;  // upper triangle plus diagonal
      out += std::to_string(i);
      out += ' ';
      out += std::to_string(a.col_idx[e]);
      out += ' ';
      out += format_double(a.vals[e]);
      out += '\n';
    }
  return out;
}

}  // namespace sep
