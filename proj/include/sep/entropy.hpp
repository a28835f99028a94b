#pragma once

#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "sep/coding_tree.hpp"
#include "sep/graph.hpp"

namespace sep {

/// Logarithm base used when scoring tree edits. The base only scales the
/// objective, so greedy decisions are unaffected on tie-free inputs;
/// reported entropies are always base 2 (bits).
enum class LogBase { Two, Natural };

/// Structural entropy of a graph under a coding tree: the sum over nonroot
/// tree nodes of -(cut(v)/vol(V)) * log2(vol(v)/vol(parent(v))).
/// Terms with cut(v) == 0 or vol(v) == 0 contribute zero.
struct EntropyReport {
  double total = 0.0;
  std::vector<std::pair<int, double>> per_node_term;  // (tree node id, term), id-sorted

  /// {"total": real, "terms": {tree-node-id: real}}
  nlohmann::ordered_json to_json() const;
};

/// Entropy from the tree's cached stats. OpenMP kernel with a fixed
/// chunked reduction: results are bit-identical for any thread count.
EntropyReport structural_entropy(const Graph& g, const CodingTree& tree);
double total_entropy(const Graph& g, const CodingTree& tree);

/// Plain in-order reference used to cross-check the kernel.
EntropyReport structural_entropy_serial(const Graph& g, const CodingTree& tree);
double total_entropy_serial(const Graph& g, const CodingTree& tree);

/// Rebuilds every node's volume and cut from the graph: volumes bottom-up
/// per level, cuts by walking each edge's endpoints to their lowest common
/// ancestor. OpenMP kernel plus a serial reference.
void recompute_stats(const Graph& g, CodingTree& tree);
void recompute_stats_serial(const Graph& g, CodingTree& tree);

/// Entropy reduction if root children a and b were merged under a new
/// parent: (2*w(a,b)/vol(V)) * log(vol(V)/(vol(a)+vol(b))). Computed from
/// cached stats and one boundary scan, never a full recompute.
double delta_merge(const Graph& g, const CodingTree& tree, int a, int b,
                   LogBase base = LogBase::Two);

/// Entropy increase if internal node v were deleted and its children
/// lifted: ((cut(v) - sum of child cuts)/vol(V)) * log(vol(v)/vol(parent)).
double delta_remove(const Graph& g, const CodingTree& tree, int v,
                    LogBase base = LogBase::Two);

/// Total edge weight between the leaf sets of two tree nodes.
double subtree_link_weight(const Graph& g, const CodingTree& tree, int a, int b);

/// Throws StructuralError unless the tree's leaves are exactly the graph's
/// nodes; throws DomainError on zero total volume.
void validate_tree_for(const Graph& g, const CodingTree& tree);

}  // namespace sep
