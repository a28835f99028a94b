#include "sep/graph.hpp"

#include <algorithm>
#include <cmath>

namespace sep {

Graph Graph::from_edges(std::size_t node_count, std::vector<Edge> edges) {
  Graph g;
  g.node_count_ = node_count;

  for (auto& e : edges) {
    if (e.u >= node_count || e.v >= node_count)
      throw DomainError("edge endpoint out of range");
    if (!(e.w >= 0.0) || !std::isfinite(e.w))
      throw DomainError("edge weight must be a nonnegative finite real");
    if (e.u > e.v) std::swap(e.u, e.v);
  }

  // Drop self-loops, then merge parallel edges by summing weights.
  std::erase_if(edges, [](const Edge& e) { return e.u == e.v; });
  std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
    return a.u != b.u ? a.u < b.u : a.v < b.v;
  });
  std::vector<Edge> merged;
  merged.reserve(edges.size());
  for (const Edge& e : edges) {
    if (!merged.empty() && merged.back().u == e.u && merged.back().v == e.v)
      merged.back().w += e.w;
    else
      merged.push_back(e);
  }
  g.edges_ = std::move(merged);

  g.degree_.assign(node_count, 0.0);
  for (const Edge& e : g.edges_) {
    g.degree_[e.u] += e.w;
    g.degree_[e.v] += e.w;
  }
  g.total_volume_ = 0.0;
  for (double d : g.degree_) g.total_volume_ += d;
  for (std::size_t v = 0; v < node_count; ++v)
    if (g.degree_[v] == 0.0) ++g.isolated_count_;

  // CSR with both directions; neighbor lists come out id-sorted.
  std::vector<std::size_t> counts(node_count + 1, 0);
  for (const Edge& e : g.edges_) {
    ++counts[e.u + 1];
    ++counts[e.v + 1];
  }
  for (std::size_t i = 0; i < node_count; ++i) counts[i + 1] += counts[i];
  g.adj_offsets_ = counts;
  g.adj_nodes_.resize(2 * g.edges_.size());
  g.adj_weights_.resize(2 * g.edges_.size());
  std::vector<std::size_t> cursor(g.adj_offsets_.begin(), g.adj_offsets_.end() - 1);
  for (const Edge& e : g.edges_) {
    g.adj_nodes_[cursor[e.u]] = e.v;
    g.adj_weights_[cursor[e.u]++] = e.w;
  }
  for (const Edge& e : g.edges_) {
    g.adj_nodes_[cursor[e.v]] = e.u;
    g.adj_weights_[cursor[e.v]++] = e.w;
  }
  // Forward then backward fill leaves each list sorted except interleaving;
  // restore order with a per-node sort over (node, weight) pairs.
  for (std::size_t u = 0; u < node_count; ++u) {
    auto begin = g.adj_offsets_[u];
    auto end = g.adj_offsets_[u + 1];
    std::vector<std::pair<NodeId, double>> nbrs;
    nbrs.reserve(end - begin);
    for (auto i = begin; i < end; ++i) nbrs.emplace_back(g.adj_nodes_[i], g.adj_weights_[i]);
    std::sort(nbrs.begin(), nbrs.end());
    for (auto i = begin; i < end; ++i) {
      g.adj_nodes_[i] = nbrs[i - begin].first;
      g.adj_weights_[i] = nbrs[i - begin].second;
    }
  }
  return g;
}

bool Graph::connected() const {
  if (node_count_ == 0) return true;
  std::vector<char> seen(node_count_, 0);
  std::vector<NodeId> stack{0};
  seen[0] = 1;
  std::size_t visited = 1;
  while (!stack.empty()) {
    NodeId u = stack.back();
    stack.pop_back();
    for (NodeId v : neighbors(u)) {
      if (!seen[v]) {
        seen[v] = 1;
        ++visited;
        stack.push_back(v);
      }
    }
  }
  return visited == node_count_;
}

}  // namespace sep
