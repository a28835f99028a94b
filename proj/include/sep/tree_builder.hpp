#pragma once

#include <cstddef>
#include <vector>

#include "sep/coding_tree.hpp"
#include "sep/entropy.hpp"
#include "sep/graph.hpp"

namespace sep {

/// Step-by-step record of the greedy construction, for tests that replay
/// or audit the selection rule.
struct BuildTrace {
  struct MergeChoice {
    int a = CodingTree::npos;  // arena ids at the time of the merge
    int b = CodingTree::npos;
    int min_leaf_a = 0;  // normalized: min_leaf_a <= min_leaf_b
    int min_leaf_b = 0;
    double delta = 0.0;
    bool fallback = false;  // no edge-linked pair existed (disconnected graph)
  };
  struct RemoveChoice {
    int v = CodingTree::npos;
    int min_leaf = 0;
    double delta = 0.0;
  };

  std::vector<MergeChoice> merges;
  std::vector<RemoveChoice> removals;
  std::size_t initial_internal_nodes = 0;

  /// When set, the builder evaluates the full entropy before and after
  /// every splice and stores the differences below. Costly; tests only.
  bool record_edit_entropy = false;
  std::vector<double> fill_deltas;
  std::vector<double> pad_deltas;
};

struct BuildOptions {
  LogBase log_base = LogBase::Two;
  /// 1 = stop after the bottom-up merging, 2 = after height compression,
  /// 3 = full construction (default).
  int stop_after_stage = 3;
  BuildTrace* trace = nullptr;
};

/// Greedy fixed-height coding tree construction.
///
/// Stage 1 repeatedly merges the pair of root children with the largest
/// entropy reduction until the root has at most two children; only pairs
/// whose leaf sets share an edge are candidates (a pair without edges has
/// exactly zero reduction), kept in a lazy max-heap keyed by the merge
/// delta. Stage 2 removes the internal node with the smallest entropy
/// increase until the height is at most k. Stage 3 splices entropy-neutral
/// nodes into every cross-layer link, then pads unary chains above the
/// leaves if the tree is still shorter than k.
///
/// Ties break toward the smallest min-leaf ids, so the construction is
/// fully deterministic. The result has every leaf at depth exactly k.
CodingTree build_coding_tree(const Graph& g, int k);
CodingTree build_coding_tree(const Graph& g, int k, const BuildOptions& opts);

}  // namespace sep
