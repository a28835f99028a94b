#pragma once

#include "sep/coding_tree.hpp"
#include "sep/graph.hpp"

namespace sep {

struct OptimalResult {
  CodingTree tree;
  double entropy = 0.0;
};

/// Exact minimum structural entropy over every hierarchical partition of
/// depth <= k, by exhaustive set-partition enumeration with memoization
/// over node subsets. The entropy value is computed from bitmask volume
/// and cut tables, independently of the tree machinery it is checked
/// against. Refuses graphs above 8 nodes and k outside {1, 2, 3}.
OptimalResult brute_force_optimal(const Graph& g, int k);

/// Every labeled connected graph on n nodes (unit weights), in edge-mask
/// order. Refuses n > 6.
std::vector<Graph> enumerate_connected_graphs(std::size_t n);

}  // namespace sep
