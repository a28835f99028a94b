#include "sep/brute_force.hpp"

#include <bit>
#include <cmath>
#include <limits>
#include <unordered_map>

#include "sep/entropy.hpp"

namespace sep {

namespace {

using Mask = std::uint32_t;

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Enumerator {
  const Graph& g;
  double total_volume;
  std::vector<double> vol;  // per subset mask
  std::vector<double> cut;
  // best interior cost and chosen partition, keyed by (mask << 2) | budget
  std::unordered_map<Mask, double> best;
  std::unordered_map<Mask, std::vector<Mask>> choice;

  explicit Enumerator(const Graph& graph) : g(graph), total_volume(graph.total_volume()) {
    auto n = g.node_count();
    vol.assign(Mask{1} << n, 0.0);
    cut.assign(Mask{1} << n, 0.0);
    for (Mask mask = 1; mask < (Mask{1} << n); ++mask) {
      Mask low = mask & (mask - 1);
      int bit = std::countr_zero(mask);
      vol[mask] = vol[low] + g.degree(static_cast<NodeId>(bit));
    }
    for (Mask mask = 1; mask < (Mask{1} << n); ++mask) {
      double c = 0.0;
      for (const Edge& e : g.edges()) {
        bool in_u = mask & (Mask{1} << e.u);
        bool in_v = mask & (Mask{1} << e.v);
        if (in_u != in_v) c += e.w;
      }
      cut[mask] = c;
    }
  }

  double term(Mask block, double parent_vol) const {
    if (cut[block] == 0.0 || vol[block] == 0.0) return 0.0;
    return -(cut[block] / total_volume) * std::log2(vol[block] / parent_vol);
  }

  // Interior cost of the subtree whose cluster is `mask`: the terms of all
  // strict descendants, minimized over partitions of depth <= budget.
  double solve(Mask mask, int budget) {
    if (std::popcount(mask) == 1) return 0.0;
    if (budget <= 0) return kInf;
    Mask key = (mask << 2) | static_cast<Mask>(budget);
    if (auto it = best.find(key); it != best.end()) return it->second;

    double best_cost = kInf;
    std::vector<Mask> best_blocks;
    if (budget == 1) {
      // only the flat split into singletons fits in one level
      best_cost = 0.0;
      Mask rest = mask;
      while (rest) {
        Mask bit = rest & (0u - rest);
        best_cost += term(bit, vol[mask]);
        best_blocks.push_back(bit);
        rest ^= bit;
      }
    } else {
      std::vector<Mask> blocks;
      enumerate_partitions(mask, mask, budget, 0.0, blocks, best_cost, best_blocks);
    }
    best.emplace(key, best_cost);
    choice.emplace(key, std::move(best_blocks));
    return best_cost;
  }

  // Recursively peel the block containing the lowest remaining bit; a
  // single-block partition of the full mask is skipped (it only inserts
  // an entropy-neutral chain node).
  void enumerate_partitions(Mask full, Mask rest, int budget, double acc,
                            std::vector<Mask>& blocks, double& best_cost,
                            std::vector<Mask>& best_blocks) {
    if (acc >= best_cost) return;
    if (rest == 0) {
      best_cost = acc;
      best_blocks = blocks;
      return;
    }
    Mask low = rest & (0u - rest);
    Mask others = rest ^ low;
    // iterate all submasks of `others`, combining each with `low`
    Mask sub = others;
    while (true) {
      Mask block = low | sub;
      if (!(blocks.empty() && block == full)) {
        double cost = term(block, vol[full]) + solve(block, budget - 1);
        if (cost < kInf) {
          blocks.push_back(block);
          enumerate_partitions(full, rest ^ block, budget, acc + cost, blocks, best_cost,
                               best_blocks);
          blocks.pop_back();
        }
      }
      if (sub == 0) break;
      sub = (sub - 1) & others;
    }
  }

  const std::vector<Mask>& blocks_of(Mask mask, int budget) const {
    return choice.at((mask << 2) | static_cast<Mask>(budget));
  }
};

}  // namespace

OptimalResult brute_force_optimal(const Graph& g, int k) {
  if (g.node_count() > 8)
    throw DomainError("exhaustive search refused: graph has " +
                      std::to_string(g.node_count()) + " nodes (limit 8)");
  if (k < 1 || k > 3) throw DomainError("exhaustive search supports heights 1..3");
  if (g.total_volume() == 0.0)
    throw DomainError("structural entropy is undefined on an edgeless graph (zero volume)");

  Enumerator en(g);
  Mask full = (Mask{1} << g.node_count()) - 1;
  double optimum = en.solve(full, k);

  // Materialize the argmin hierarchy as a tree.
  std::vector<int> parent;
  std::vector<int> leaf_graph;
  auto new_slot = [&](int p, int graph_node) {
    parent.push_back(p);
    leaf_graph.push_back(graph_node);
    return static_cast<int>(parent.size()) - 1;
  };
  int root = new_slot(CodingTree::npos, CodingTree::npos);

  struct Item {
    Mask mask;
    int budget;
    int slot;
  };
  std::vector<Item> stack;
  for (Mask b : en.blocks_of(full, k)) {
    if (std::popcount(b) == 1)
      new_slot(root, std::countr_zero(b));
    else
      stack.push_back({b, k - 1, new_slot(root, CodingTree::npos)});
  }
  while (!stack.empty()) {
    Item item = stack.back();
    stack.pop_back();
    for (Mask b : en.blocks_of(item.mask, item.budget)) {
      if (std::popcount(b) == 1)
        new_slot(item.slot, std::countr_zero(b));
      else
        stack.push_back({b, item.budget - 1, new_slot(item.slot, CodingTree::npos)});
    }
  }

  CodingTree tree = CodingTree::from_parents(g, parent, leaf_graph);
  recompute_stats_serial(g, tree);
  tree.canonicalize();
  return {std::move(tree), optimum};
}

std::vector<Graph> enumerate_connected_graphs(std::size_t n) {
  if (n < 1 || n > 6) throw DomainError("graph enumeration supports 1..6 nodes");
  std::vector<std::pair<NodeId, NodeId>> pairs;
  for (NodeId u = 0; u < n; ++u)
    for (NodeId v = u + 1; v < n; ++v) pairs.emplace_back(u, v);
  std::vector<Graph> out;
  for (std::uint32_t mask = 0; mask < (1u << pairs.size()); ++mask) {
    std::vector<Edge> edges;
    for (std::size_t i = 0; i < pairs.size(); ++i)
      if (mask & (1u << i)) edges.push_back({pairs[i].first, pairs[i].second, 1.0});
    Graph g = Graph::from_edges(n, std::move(edges));
    if (g.connected()) out.push_back(std::move(g));
  }
  return out;
}

}  // namespace sep
