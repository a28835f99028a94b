#pragma once

// Shared test utilities: independent entropy oracles, random graph/tree
// generators, and the exhaustive replay of the greedy selection rule.
// Everything here recomputes from first principles (edge scans over leaf
// sets) so the production caches and formulas are checked against an
// independent path.

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "sep/brute_force.hpp"
#include "sep/entropy.hpp"
#include "sep/generators.hpp"
#include "sep/graph.hpp"
#include "sep/pooling.hpp"
#include "sep/tree_builder.hpp"

namespace test_support {

inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// ---- independent oracle -------------------------------------------------

// Leaf set of a tree node by direct traversal (no production helpers).
inline std::vector<sep::NodeId> oracle_leaf_set(const sep::CodingTree& t, int v) {
  std::vector<sep::NodeId> out;
  std::vector<int> stack{v};
  while (!stack.empty()) {
    int u = stack.back();
    stack.pop_back();
    if (t.graph_node(u) != sep::CodingTree::npos) {
      out.push_back(static_cast<sep::NodeId>(t.graph_node(u)));
    } else {
      for (int c : t.children(u)) stack.push_back(c);
    }
  }
  return out;
}

struct OracleStats {
  double volume = 0.0;
  double cut = 0.0;
};

// Volume by summing degrees, cut by scanning every edge against a
// membership mark of the leaf set.
inline OracleStats oracle_stats(const sep::Graph& g, const sep::CodingTree& t, int v) {
  std::vector<char> inside(g.node_count(), 0);
  OracleStats s;
  for (sep::NodeId u : oracle_leaf_set(t, v)) {
    inside[u] = 1;
    s.volume += g.degree(u);
  }
  for (const sep::Edge& e : g.edges())
    if (inside[e.u] != inside[e.v]) s.cut += e.w;
  return s;
}

// Direct term-by-term summation of the entropy definition, recomputing
// every volume and cut from the edge list.
inline double oracle_entropy(const sep::Graph& g, const sep::CodingTree& t) {
  double vol_total = g.total_volume();
  double total = 0.0;
  for (std::size_t v = 0; v < t.arena_size(); ++v) {
    int id = static_cast<int>(v);
    if (!t.alive(id) || id == t.root()) continue;
    OracleStats s = oracle_stats(g, t, id);
    OracleStats sp = oracle_stats(g, t, t.parent(id));
    if (s.cut == 0.0 || s.volume == 0.0) continue;
    total += -(s.cut / vol_total) * std::log2(s.volume / sp.volume);
  }
  return total;
}

// ---- random inputs ------------------------------------------------------

inline sep::Graph random_weighted_graph(std::size_t n, double p, std::mt19937_64& rng,
                                        double w_lo = 0.5, double w_hi = 2.0) {
  std::vector<sep::Edge> edges;
  for (sep::NodeId u = 0; u < n; ++u)
    for (sep::NodeId v = u + 1; v < n; ++v)
      if (uniform01(rng) < p)
        edges.push_back({u, v, w_lo + (w_hi - w_lo) * uniform01(rng)});
  return sep::Graph::from_edges(n, std::move(edges));
}

// Any graph with at least one edge, unit weights.
inline sep::Graph random_unit_graph(std::size_t n, double p, std::mt19937_64& rng) {
  while (true) {
    std::vector<sep::Edge> edges;
    for (sep::NodeId u = 0; u < n; ++u)
      for (sep::NodeId v = u + 1; v < n; ++v)
        if (uniform01(rng) < p) edges.push_back({u, v, 1.0});
    if (!edges.empty()) return sep::Graph::from_edges(n, std::move(edges));
  }
}

// Random hierarchical partition over the graph nodes: blocks split
// recursively with random arity, singletons become leaves early, so the
// result routinely has cross-layer links. Stats are left to the caller.
inline sep::CodingTree random_tree(const sep::Graph& g, std::mt19937_64& rng,
                                   int max_depth = 4) {
  std::vector<int> parent;
  std::vector<int> leaf_graph;
  auto new_slot = [&](int p, int gn) {
    parent.push_back(p);
    leaf_graph.push_back(gn);
    return static_cast<int>(parent.size()) - 1;
  };
  int root = new_slot(sep::CodingTree::npos, sep::CodingTree::npos);

  struct Item {
    std::vector<sep::NodeId> ids;
    int slot;
    int budget;
  };
  std::vector<sep::NodeId> all(g.node_count());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<sep::NodeId>(i);
  std::vector<Item> stack{{all, root, max_depth}};
  while (!stack.empty()) {
    Item item = std::move(stack.back());
    stack.pop_back();
    bool flat = item.budget <= 1 || item.ids.size() <= 2 || uniform01(rng) < 0.3;
    if (flat) {
      for (sep::NodeId id : item.ids) new_slot(item.slot, static_cast<int>(id));
      continue;
    }
    std::size_t n_blocks =
        2 + static_cast<std::size_t>(uniform01(rng) * std::min<std::size_t>(3, item.ids.size() - 2));
    std::vector<std::vector<sep::NodeId>> blocks(n_blocks);
    for (std::size_t i = 0; i < item.ids.size(); ++i)
      blocks[i < n_blocks ? i : static_cast<std::size_t>(uniform01(rng) * n_blocks)].push_back(
          item.ids[i]);
    for (auto& block : blocks) {
      if (block.empty()) continue;
      if (block.size() == 1) {
        new_slot(item.slot, static_cast<int>(block[0]));
      } else {
        int slot = new_slot(item.slot, sep::CodingTree::npos);
        stack.push_back({std::move(block), slot, item.budget - 1});
      }
    }
  }
  return sep::CodingTree::from_parents(g, parent, leaf_graph);
}

// Graph with node ids relabeled by perm (perm[old] = new).
inline sep::Graph permute_graph(const sep::Graph& g, const std::vector<sep::NodeId>& perm) {
  std::vector<sep::Edge> edges;
  for (const sep::Edge& e : g.edges()) edges.push_back({perm[e.u], perm[e.v], e.w});
  return sep::Graph::from_edges(g.node_count(), std::move(edges));
}

// ---- partitions ---------------------------------------------------------

// Leaf partition at every depth: partitions[d] is the canonical (sorted)
// list of leaf clusters induced by the nodes at depth d.
inline std::vector<std::vector<std::vector<sep::NodeId>>> level_partitions(
    const sep::CodingTree& t) {
  auto depth = t.depths();
  int max_depth = 0;
  for (std::size_t v = 0; v < t.arena_size(); ++v)
    if (t.alive(static_cast<int>(v))) max_depth = std::max(max_depth, depth[v]);
  std::vector<std::vector<std::vector<sep::NodeId>>> out(max_depth + 1);
  for (std::size_t v = 0; v < t.arena_size(); ++v) {
    int id = static_cast<int>(v);
    if (!t.alive(id)) continue;
    auto leaves = oracle_leaf_set(t, id);
    std::sort(leaves.begin(), leaves.end());
    out[depth[id]].push_back(std::move(leaves));
  }
  for (auto& level : out) std::sort(level.begin(), level.end());
  return out;
}

// ---- greedy selection replay (exhaustive argmax/argmin) -----------------

struct ReplayResult {
  bool ok = true;
  std::string message;
};

// Re-runs the greedy construction with public tree edits, selecting every
// step by exhaustive scan: stage 1 takes the argmax of delta_merge over
// root-child pairs whose leaf sets share an edge (canonical fallback when
// none does), stage 2 the argmin of delta_remove over internal nodes.
// Ties break on (min-leaf pair) for merges and (min leaf, node id) for
// removals. Each choice is compared against the builder's trace.
inline ReplayResult replay_greedy(const sep::Graph& g, int k) {
  sep::BuildTrace trace;
  sep::BuildOptions opts;
  opts.trace = &trace;
  sep::CodingTree built = sep::build_coding_tree(g, k, opts);
  (void)built;

  auto fail = [](std::string msg) { return ReplayResult{false, std::move(msg)}; };

  sep::CodingTree t = sep::CodingTree::star(g);
  auto root_children = [&] {
    std::vector<int> rc;
    for (std::size_t v = 0; v < t.arena_size(); ++v)
      if (t.alive(static_cast<int>(v)) && static_cast<int>(v) != t.root() &&
          t.parent(static_cast<int>(v)) == t.root())
        rc.push_back(static_cast<int>(v));
    return rc;
  };
  // total edge weight between the root-child clusters of u's and v's leaves
  auto pair_weights = [&](const std::vector<int>& rc) {
    std::vector<int> label(g.node_count(), -1);
    for (int c : rc)
      for (sep::NodeId u : oracle_leaf_set(t, c)) label[u] = c;
    std::map<std::pair<int, int>, double> w;
    for (const sep::Edge& e : g.edges()) {
      int a = label[e.u], b = label[e.v];
      if (a == b) continue;
      w[{std::min(a, b), std::max(a, b)}] += e.w;
    }
    return w;
  };

  std::size_t merge_idx = 0;
  while (root_children().size() > 2) {
    auto rc = root_children();
    auto weights = pair_weights(rc);
    int best_a = -1, best_b = -1;
    double best_delta = 0.0;
    int best_lo = 0, best_hi = 0;
    for (const auto& [pair, w] : weights) {
      if (w <= 0.0) continue;
      double delta = sep::delta_merge(g, t, pair.first, pair.second);
      int lo = std::min(t.min_leaf(pair.first), t.min_leaf(pair.second));
      int hi = std::max(t.min_leaf(pair.first), t.min_leaf(pair.second));
      bool better = best_a == -1 || delta > best_delta ||
                    (delta == best_delta && (lo < best_lo || (lo == best_lo && hi < best_hi)));
      if (better) {
        best_a = pair.first;
        best_b = pair.second;
        best_delta = delta;
        best_lo = lo;
        best_hi = hi;
      }
    }
    bool fallback = best_a == -1;
    if (fallback) {
      // no linked pair: canonical order, two smallest min-leaf children
      std::sort(rc.begin(), rc.end(),
                [&](int x, int y) { return t.min_leaf(x) < t.min_leaf(y); });
      best_a = rc[0];
      best_b = rc[1];
      best_delta = 0.0;
    }
    if (merge_idx >= trace.merges.size()) return fail("builder recorded too few merges");
    const auto& rec = trace.merges[merge_idx++];
    if (std::minmax(rec.a, rec.b) != std::minmax(best_a, best_b))
      return fail("stage-1 choice mismatch at step " + std::to_string(merge_idx - 1) +
                  ": builder merged (" + std::to_string(rec.a) + "," + std::to_string(rec.b) +
                  "), exhaustive argmax is (" + std::to_string(best_a) + "," +
                  std::to_string(best_b) + ")");
    if (rec.fallback != fallback) return fail("stage-1 fallback flag mismatch");
    if (std::abs(rec.delta - best_delta) > 1e-9)
      return fail("stage-1 delta mismatch: " + std::to_string(rec.delta) + " vs " +
                  std::to_string(best_delta));
    t.merge(g, best_a, best_b);
  }

  std::size_t remove_idx = 0;
  while (t.height() > k) {
    int best_v = -1;
    double best_delta = 0.0;
    for (std::size_t v = 0; v < t.arena_size(); ++v) {
      int id = static_cast<int>(v);
      if (!t.alive(id) || !t.is_internal(id)) continue;
      double delta = sep::delta_remove(g, t, id);
      bool better = best_v == -1 || delta < best_delta ||
                    (delta == best_delta &&
                     (t.min_leaf(id) < t.min_leaf(best_v) ||
                      (t.min_leaf(id) == t.min_leaf(best_v) && id < best_v)));
      if (better) {
        best_v = id;
        best_delta = delta;
      }
    }
    if (best_v == -1) return fail("no removable node while height > k");
    if (remove_idx >= trace.removals.size()) return fail("builder recorded too few removals");
    const auto& rec = trace.removals[remove_idx++];
    if (rec.v != best_v)
      return fail("stage-2 choice mismatch at step " + std::to_string(remove_idx - 1) +
                  ": builder removed " + std::to_string(rec.v) + ", exhaustive argmin is " +
                  std::to_string(best_v));
    if (std::abs(rec.delta - best_delta) > 1e-9) return fail("stage-2 delta mismatch");
    t.remove(best_v);
  }
  if (merge_idx != trace.merges.size())
    return fail("builder recorded extra merges");
  if (remove_idx != trace.removals.size())
    return fail("builder recorded extra removals");
  return {};
}

// ---- reconstruction baseline --------------------------------------------

// Random hard partition with the same multiset of cluster sizes as s.
inline sep::ClusterAssignment random_assignment_like(const sep::ClusterAssignment& s,
                                                     std::mt19937_64& rng) {
  std::vector<std::size_t> sizes(s.rows, 0);
  for (auto c : s.cluster_of) ++sizes[c];
  std::vector<std::uint32_t> nodes(s.cols);
  for (std::uint32_t j = 0; j < s.cols; ++j) nodes[j] = j;
  for (std::size_t i = nodes.size(); i > 1; --i)
    std::swap(nodes[i - 1], nodes[static_cast<std::size_t>(uniform01(rng) * i)]);
  sep::ClusterAssignment out;
  out.level = s.level;
  out.rows = s.rows;
  out.cols = s.cols;
  out.cluster_of.resize(s.cols);
  std::size_t pos = 0;
  for (std::uint32_t c = 0; c < s.rows; ++c)
    for (std::size_t i = 0; i < sizes[c]; ++i) out.cluster_of[nodes[pos++]] = c;
  return out;
}

}  // namespace test_support
