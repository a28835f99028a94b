#pragma once

#include <limits>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "sep/graph.hpp"

namespace sep {

/// Per-tree-node statistics of the leaf-descendant set: its volume (sum of
/// weighted leaf degrees) and its cut (total weight of edges with exactly
/// one endpoint inside the set).
struct NodeStats {
  double volume = 0.0;
  double cut = 0.0;
};

/// Rooted tree whose leaves are the graph nodes; every internal node stands
/// for the cluster of its leaf descendants. Nodes live in an arena; edits
/// mark slots dead rather than erasing, and canonicalize() compacts ids.
///
/// Child lists are kept in canonical order (ascending minimum leaf id in
/// the subtree), which makes every traversal and serialization stable.
class CodingTree {
public:
  static constexpr int npos = -1;

  /// Height-1 star: all graph nodes as leaves directly under the root.
  static CodingTree star(const Graph& g);

  /// Rebuilds a tree from a parent array (root has parent npos). Entries
  /// of leaf_graph_node give the graph node of each leaf and npos for
  /// internal slots. Stats are NOT populated; see recompute_stats().
  static CodingTree from_parents(const Graph& g, const std::vector<int>& parent,
                                 const std::vector<int>& leaf_graph_node);

  int root() const { return root_; }
  std::size_t alive_count() const { return alive_count_; }
  std::size_t arena_size() const { return nodes_.size(); }
  std::size_t leaf_count() const { return leaf_of_.size(); }

  bool alive(int v) const { return v >= 0 && v < static_cast<int>(nodes_.size()) && nodes_[v].alive; }
  bool is_leaf(int v) const { return nodes_[v].graph_node != npos; }
  bool is_internal(int v) const { return v != root_ && !is_leaf(v); }

  int parent(int v) const { return nodes_[v].parent; }
  std::span<const int> children(int v) const { return nodes_[v].children; }
  const NodeStats& stats(int v) const { return nodes_[v].stats; }
  double volume(int v) const { return nodes_[v].stats.volume; }
  double cut(int v) const { return nodes_[v].stats.cut; }

  /// Graph node of a leaf (npos for internal nodes).
  int graph_node(int v) const { return nodes_[v].graph_node; }
  /// Tree leaf that carries a graph node.
  int leaf(NodeId graph_node) const { return leaf_of_[graph_node]; }

  /// Smallest graph id among the leaf descendants; the canonical sort key.
  int min_leaf(int v) const { return nodes_[v].min_leaf; }

  /// Longest downward path length (leaves have height 0). Cached and
  /// maintained by every edit.
  int height(int v) const { return nodes_[v].height; }
  int height() const { return nodes_[root_].height; }

  /// Depth of every alive node from the root; npos for dead slots.
  std::vector<int> depths() const;

  /// Graph nodes in the subtree below v, ascending.
  std::vector<NodeId> leaf_descendants(int v) const;

  // -- the three edits --------------------------------------------------

  /// Pairs two root children a, b under a fresh node. The new node's
  /// volume is vol(a)+vol(b) and its cut is cut(a)+cut(b)-2*w(a,b) with
  /// w(a,b) the total edge weight between the two leaf sets. Returns the
  /// new node's id.
  int merge(const Graph& g, int a, int b);

  /// Deletes internal node v and lifts its children to v's parent.
  /// Stats of every remaining node are unchanged.
  void remove(int v);

  /// Splices a fresh node between v and its parent; requires the
  /// cross-layer condition height(parent(v)) - height(v) > 1. The new
  /// node inherits v's stats, so the entropy is unchanged. Returns it.
  int fill(int v);

  // ---------------------------------------------------------------------

  /// Sorts child lists canonically and renumbers ids in breadth-first
  /// order from the root, dropping dead arena slots.
  void canonicalize();

  /// True when every nonroot node sits exactly one level below its parent
  /// (equivalently, all leaves share the same depth).
  bool layered() const;

  void set_stats(int v, NodeStats s) { nodes_[v].stats = s; }

  /// {"height":k,"nodes":[{"id","parent","children","vol","cut"}...],
  ///  "leaf_of":{graph-id: tree-id}}; stable bytes for a fixed tree.
  nlohmann::ordered_json to_json() const;
  static CodingTree from_json(const Graph& g, const nlohmann::json& j);

private:
  friend class TreeBuilder;

  struct Node {
    int parent = npos;
    std::vector<int> children;
    NodeStats stats;
    int graph_node = npos;
    int min_leaf = std::numeric_limits<int>::max();
    int height = 0;
    bool alive = true;
  };

  std::vector<Node> nodes_;
  std::vector<int> leaf_of_;  // graph node -> leaf slot
  int root_ = npos;
  std::size_t alive_count_ = 0;

  int new_node();
  void check_alive(int v, const char* who) const;
  // Splice a fresh node above v without the cross-layer precondition;
  // shared by fill() and the builder's chain padding.
  int splice_above(int v);
  // Recompute cached heights from v upward until they stop changing.
  void refresh_heights_upward(int v);
  int child_height_max(int v) const;
  static void insert_sorted_child(std::vector<int>& list, int child, const std::vector<Node>& nodes);
};

}  // namespace sep
