#include "sep/tree_builder.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

namespace sep {

namespace {

inline double log_in(LogBase base, double x) {
  return base == LogBase::Two ? std::log2(x) : std::log(x);
}

// Stage-1 heap entry. Bounds carry, per node, an upper bound on the delta
// of every pair that node participates in; exacts carry a concrete pair
// with its true delta. At equal keys bounds come out first so that every
// potentially tied pair is refined to an exact before a merge commits,
// which keeps the documented tie-break intact.
struct Stage1Entry {
  double key;
  bool exact;
  int ml_lo, ml_hi;  // pair min-leaf tie key; bounds use (min_leaf, min_leaf)
  int a, b;          // exact: the pair; bound: (node, npos)
  double w;          // exact: the pair's link weight, frozen while both live
};

struct Stage1Less {
  bool operator()(const Stage1Entry& x, const Stage1Entry& y) const {
    if (x.key != y.key) return x.key < y.key;
    if (x.exact != y.exact) return x.exact;  // bound outranks exact
    if (x.ml_lo != y.ml_lo) return x.ml_lo > y.ml_lo;
    return x.ml_hi > y.ml_hi;
  }
};

struct RemoveCand {
  double delta;
  int min_leaf;
  int v;
  std::uint32_t version;
};

// Top: smallest delta, then smallest min_leaf, then smallest id.
struct RemoveCandLess {
  bool operator()(const RemoveCand& x, const RemoveCand& y) const {
    if (x.delta != y.delta) return x.delta > y.delta;
    if (x.min_leaf != y.min_leaf) return x.min_leaf > y.min_leaf;
    return x.v > y.v;
  }
};

}  // namespace

class TreeBuilder {
public:
  TreeBuilder(const Graph& g, int k, const BuildOptions& opts)
      : g_(g), k_(k), opts_(opts), total_volume_(g.total_volume()) {}

  CodingTree run() {
    if (k_ <= 1)
      throw DomainError("coding tree height must be > 1 (got " + std::to_string(k_) +
                        "); use the height-1 star tree for flat entropy");
    if (g_.edge_count() == 0 || total_volume_ == 0.0)
      throw DomainError("coding tree construction needs a graph with at least one "
                        "positively weighted edge");

    tree_ = CodingTree::star(g_);
    grow_side_arrays();
    init_links();

    stage1();
    if (opts_.stop_after_stage >= 2) stage2();
    if (opts_.stop_after_stage >= 3) {
      stage3_fill();
      pad_to_height();
    }
    tree_.canonicalize();
    if (opts_.stop_after_stage >= 3) {
      if (tree_.height() != k_ || !tree_.layered())
        throw StructuralError("tree construction postcondition failed");
    }
    return std::move(tree_);
  }

private:
  const Graph& g_;
  const int k_;
  const BuildOptions& opts_;
  const double total_volume_;

  CodingTree tree_;
  // Link weights between root children, stored flat and lazily: entries
  // may carry stale ids (consumed partners) and duplicate ids; both are
  // resolved through the union-find and combined on the next compaction
  // of that list, never rewritten eagerly.
  std::vector<std::vector<std::pair<int, double>>> links_;
  std::vector<double> scratch_w_;  // dense accumulator for compaction
  std::vector<int> scratch_touched_;
  std::vector<int> uf_parent_;
  std::vector<double> child_cut_sum_;
  std::vector<std::uint32_t> version_;
  std::vector<int> root_children_;
  std::vector<int> root_pos_;  // position in root_children_, -1 otherwise
  std::priority_queue<Stage1Entry, std::vector<Stage1Entry>, Stage1Less> stage1_heap_;
  // live root-child volumes, lazily filtered; the minimum never decreases
  std::priority_queue<std::pair<double, int>, std::vector<std::pair<double, int>>,
                      std::greater<>>
      volmin_heap_;

  void grow_side_arrays() {
    std::size_t old = uf_parent_.size();
    std::size_t cap = tree_.arena_size();
    links_.resize(cap);
    scratch_w_.resize(cap, 0.0);
    child_cut_sum_.resize(cap, 0.0);
    version_.resize(cap, 0);
    root_pos_.resize(cap, -1);
    uf_parent_.resize(cap);
    for (std::size_t v = old; v < cap; ++v) uf_parent_[v] = static_cast<int>(v);
  }

  int find(int x) {
    while (uf_parent_[x] != x) {
      uf_parent_[x] = uf_parent_[uf_parent_[x]];
      x = uf_parent_[x];
    }
    return x;
  }

  bool is_root_child(int v) const {
    return tree_.alive(v) && tree_.parent(v) == tree_.root();
  }

  double pair_delta(int a, int b, double w) const {
    if (w == 0.0) return 0.0;
    double vol_merged = tree_.volume(a) + tree_.volume(b);
    return (2.0 * w / total_volume_) * log_in(opts_.log_base, total_volume_ / vol_merged);
  }

  double volmin() {
    while (!volmin_heap_.empty() && !is_root_child(volmin_heap_.top().second))
      volmin_heap_.pop();
    return volmin_heap_.empty() ? 0.0 : volmin_heap_.top().first;
  }

  // Upper bound over every pair x participates in: the full boundary
  // weight paired with the smallest live volume.
  void push_bound(int x) {
    if (links_[x].empty()) return;
    double log_part = log_in(opts_.log_base, total_volume_ / (tree_.volume(x) + volmin()));
    double key = (2.0 * std::max(tree_.cut(x), 0.0) / total_volume_) * std::max(log_part, 0.0);
    stage1_heap_.push({key, false, tree_.min_leaf(x), tree_.min_leaf(x), x, CodingTree::npos, 0.0});
  }

  void init_links() {
    root_children_.reserve(g_.node_count());
    for (std::size_t i = 0; i < g_.node_count(); ++i) {
      int leaf = tree_.leaf(static_cast<NodeId>(i));
      root_pos_[leaf] = static_cast<int>(root_children_.size());
      root_children_.push_back(leaf);
      volmin_heap_.push({tree_.volume(leaf), leaf});
    }
    for (const Edge& e : g_.edges()) {
      if (e.w == 0.0) continue;  // weightless links never move any delta off zero
      links_[tree_.leaf(e.u)].emplace_back(tree_.leaf(e.v), e.w);
      links_[tree_.leaf(e.v)].emplace_back(tree_.leaf(e.u), e.w);
    }
    for (std::size_t i = 0; i < g_.node_count(); ++i)
      push_bound(tree_.leaf(static_cast<NodeId>(i)));
  }

  // Resolve stale ids through the union-find, combine duplicates in the
  // dense scratch, and drop links that became internal.
  void compact_links(int x) {
    auto& vec = links_[x];
    scratch_touched_.clear();
    for (const auto& [c, w] : vec) {
      int rep = find(c);
      if (rep == x || w == 0.0) continue;
      if (scratch_w_[rep] == 0.0) scratch_touched_.push_back(rep);
      scratch_w_[rep] += w;
    }
    vec.clear();
    for (int rep : scratch_touched_) {
      vec.emplace_back(rep, scratch_w_[rep]);
      scratch_w_[rep] = 0.0;
    }
  }

  // The exact best partner of x under the documented tie-break.
  void rescan_and_push_champion(int x) {
    compact_links(x);
    const auto& vec = links_[x];
    if (vec.empty()) return;
    bool have = false;
    double best_delta = 0.0, best_w = 0.0;
    int best_c = CodingTree::npos, best_lo = 0, best_hi = 0;
    for (const auto& [c, w] : vec) {
      double delta = pair_delta(x, c, w);
      int lo = std::min(tree_.min_leaf(x), tree_.min_leaf(c));
      int hi = std::max(tree_.min_leaf(x), tree_.min_leaf(c));
      if (!have || delta > best_delta ||
          (delta == best_delta && (lo < best_lo || (lo == best_lo && hi < best_hi)))) {
        have = true;
        best_delta = delta;
        best_w = w;
        best_c = c;
        best_lo = lo;
        best_hi = hi;
      }
    }
    stage1_heap_.push({best_delta, true, best_lo, best_hi, x, best_c, best_w});
  }

  void record_merge(int a, int b, double delta, bool fallback) {
    if (!opts_.trace) return;
    BuildTrace::MergeChoice mc;
    mc.a = a;
    mc.b = b;
    mc.min_leaf_a = std::min(tree_.min_leaf(a), tree_.min_leaf(b));
    mc.min_leaf_b = std::max(tree_.min_leaf(a), tree_.min_leaf(b));
    mc.delta = delta;
    mc.fallback = fallback;
    opts_.trace->merges.push_back(mc);
  }

  // Creates the merge node and maintains the builder-side root child set;
  // child lists regain canonical order in canonicalize().
  int merge_raw(int a, int b, double w_ab) {
    int eps = tree_.new_node();
    grow_side_arrays();
    auto& nodes = tree_.nodes_;
    CodingTree::Node& e = nodes[eps];
    e.parent = tree_.root();
    e.stats = {tree_.volume(a) + tree_.volume(b), tree_.cut(a) + tree_.cut(b) - 2.0 * w_ab};
    e.min_leaf = std::min(tree_.min_leaf(a), tree_.min_leaf(b));
    e.height = std::max(tree_.height(a), tree_.height(b)) + 1;
    e.children = tree_.min_leaf(a) <= tree_.min_leaf(b) ? std::vector<int>{a, b}
                                                        : std::vector<int>{b, a};
    nodes[a].parent = eps;
    nodes[b].parent = eps;
    child_cut_sum_[eps] = tree_.cut(a) + tree_.cut(b);
    uf_parent_[a] = eps;
    uf_parent_[b] = eps;

    for (int gone : {a, b}) {
      int pos = root_pos_[gone];
      int last = root_children_.back();
      root_children_[pos] = last;
      root_pos_[last] = pos;
      root_children_.pop_back();
      root_pos_[gone] = -1;
    }
    root_pos_[eps] = static_cast<int>(root_children_.size());
    root_children_.push_back(eps);
    return eps;
  }

  void commit_merge(int a, int b, double delta, double w_ab) {
    record_merge(a, b, delta, false);
    int eps = merge_raw(a, b, w_ab);

    // meld by concatenation, small onto large; stale and now-internal
    // entries stay behind until the next compaction touches them
    auto base = std::move(links_[a]);
    auto small = std::move(links_[b]);
    links_[a] = {};
    links_[b] = {};
    if (base.size() < small.size()) std::swap(base, small);
    base.insert(base.end(), small.begin(), small.end());
    links_[eps] = std::move(base);

    volmin_heap_.push({tree_.volume(eps), eps});
    push_bound(eps);
  }

  void stage1() {
    while (root_children_.size() > 2) {
      bool committed = false;
      while (!stage1_heap_.empty()) {
        Stage1Entry e = stage1_heap_.top();
        stage1_heap_.pop();
        if (!is_root_child(e.a)) continue;  // owner consumed: entry is dead
        if (!e.exact) {
          rescan_and_push_champion(e.a);
          continue;
        }
        if (!is_root_child(e.b)) {
          // partner consumed; the pair that replaced it is covered by the
          // merge node's own bound, so just re-cover the owner
          push_bound(e.a);
          continue;
        }
        commit_merge(e.a, e.b, e.key, e.w);
        committed = true;
        break;
      }
      if (!committed) {
        fallback_merges();
        break;
      }
    }
    finish_stage1();
  }

  // No pair of root children shares a positively weighted edge: the
  // remaining children are whole components. Merge them two at a time in
  // canonical order.
  void fallback_merges() {
    std::vector<int> order(root_children_);
    std::sort(order.begin(), order.end(),
              [&](int x, int y) { return tree_.min_leaf(x) < tree_.min_leaf(y); });
    std::size_t head = 0;
    while (root_children_.size() > 2) {
      int a = order[head];
      int b = order[head + 1];
      record_merge(a, b, 0.0, true);
      int eps = merge_raw(a, b, 0.0);
      order[head + 1] = eps;  // eps carries the smallest min_leaf so far
      ++head;
    }
  }

  void finish_stage1() {
    auto& nodes = tree_.nodes_;
    int root = tree_.root();
    std::sort(root_children_.begin(), root_children_.end(),
              [&](int x, int y) { return tree_.min_leaf(x) < tree_.min_leaf(y); });
    nodes[root].children = root_children_;
    for (std::size_t i = 0; i < root_children_.size(); ++i)
      root_pos_[root_children_[i]] = static_cast<int>(i);
    int h = 0;
    for (int c : root_children_) h = std::max(h, tree_.height(c));
    nodes[root].height = h + 1;
    // A lone root child duplicates the root's cluster; lift its children.
    if (root_children_.size() == 1 && !tree_.is_leaf(root_children_[0]))
      remove_structural(root_children_[0]);
  }

  double remove_delta(int v) const {
    double coef = tree_.cut(v) - child_cut_sum_[v];
    if (coef == 0.0) return 0.0;
    return (coef / total_volume_) *
           log_in(opts_.log_base, tree_.volume(v) / tree_.volume(tree_.parent(v)));
  }

  // REMOVE without candidate bookkeeping (stage 2 and root normalization).
  // The root's child list is the only one that grows large; its positions
  // are indexed so the erase stays O(1).
  void remove_structural(int v) {
    auto& nodes = tree_.nodes_;
    int p = nodes[v].parent;
    auto& plist = nodes[p].children;
    if (p == tree_.root() && root_pos_[v] >= 0) {
      int pos = root_pos_[v];
      int last = plist.back();
      plist[pos] = last;
      root_pos_[last] = pos;
      plist.pop_back();
      root_pos_[v] = -1;
    } else {
      plist.erase(std::find(plist.begin(), plist.end(), v));
    }
    for (int c : nodes[v].children) {
      nodes[c].parent = p;
      if (p == tree_.root()) root_pos_[c] = static_cast<int>(plist.size());
      plist.push_back(c);
    }
    child_cut_sum_[p] += child_cut_sum_[v] - tree_.cut(v);
    int hv = nodes[v].height;
    nodes[v].alive = false;
    nodes[v].children.clear();
    --tree_.alive_count_;
    // the parent's height can only have depended on v if v was a tallest child
    if (hv == nodes[p].height - 1) tree_.refresh_heights_upward(p);
  }

  void stage2() {
    std::priority_queue<RemoveCand, std::vector<RemoveCand>, RemoveCandLess> heap;
    auto push_cand = [&](int v) {
      heap.push({remove_delta(v), tree_.min_leaf(v), v, version_[v]});
    };
    std::size_t initial_internal = 0;
    for (std::size_t v = 0; v < tree_.arena_size(); ++v) {
      if (tree_.alive(static_cast<int>(v)) && tree_.is_internal(static_cast<int>(v))) {
        push_cand(static_cast<int>(v));
        ++initial_internal;
      }
    }
    if (opts_.trace) opts_.trace->initial_internal_nodes = initial_internal;

    std::size_t removed = 0;
    while (tree_.height() > k_) {
      RemoveCand best{};
      bool found = false;
      while (!heap.empty()) {
        best = heap.top();
        heap.pop();
        if (tree_.alive(best.v) && version_[best.v] == best.version) {
          found = true;
          break;
        }
      }
      if (!found)
        throw StructuralError("height compression ran out of removable nodes");
      if (opts_.trace)
        opts_.trace->removals.push_back({best.v, tree_.min_leaf(best.v), best.delta});

      int p = tree_.parent(best.v);
      std::vector<int> lifted(tree_.children(best.v).begin(), tree_.children(best.v).end());
      remove_structural(best.v);
      ++removed;
      if (removed > initial_internal)
        throw StructuralError("height compression failed to terminate");

      ++version_[p];
      if (tree_.is_internal(p)) push_cand(p);
      for (int c : lifted) {
        ++version_[c];
        if (tree_.is_internal(c)) push_cand(c);
      }
    }
  }

  double traced_entropy() { return total_entropy(g_, tree_); }

  // One FILL: insert a node between parent->children[slot] and the parent.
  // Heights above stay valid when the gap exceeds one; chain padding
  // (gap of one, tiny trees) asks for the refresh.
  int splice_at(int parent, std::size_t slot, bool refresh_heights,
                std::vector<double>* deltas) {
    double before = 0.0;
    bool tracing = deltas && opts_.trace && opts_.trace->record_edit_entropy;
    if (tracing) before = traced_entropy();

    int eps = tree_.new_node();
    grow_side_arrays();
    auto& nodes = tree_.nodes_;
    int child = nodes[parent].children[slot];
    CodingTree::Node& e = nodes[eps];
    e.parent = parent;
    e.children = {child};
    e.stats = nodes[child].stats;
    e.min_leaf = nodes[child].min_leaf;
    e.height = nodes[child].height + 1;
    nodes[child].parent = eps;
    nodes[parent].children[slot] = eps;
    if (refresh_heights) tree_.refresh_heights_upward(parent);

    if (tracing) deltas->push_back(traced_entropy() - before);
    return eps;
  }

  void stage3_fill() {
    std::vector<double>* deltas = opts_.trace ? &opts_.trace->fill_deltas : nullptr;
    std::vector<int> stack{tree_.root()};
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      // index the child list through the tree: splice_at grows the arena,
      // which can move the node storage out from under a reference
      std::size_t n_kids = tree_.children(v).size();
      for (std::size_t i = 0; i < n_kids; ++i) {
        int c = tree_.nodes_[v].children[i];
        while (tree_.height(v) - tree_.height(tree_.nodes_[v].children[i]) > 1)
          splice_at(v, i, false, deltas);
        if (!tree_.is_leaf(c)) stack.push_back(c);
      }
    }
  }

  void pad_to_height() {
    std::vector<double>* deltas = opts_.trace ? &opts_.trace->pad_deltas : nullptr;
    int shortfall = k_ - tree_.height();
    for (int round = 0; round < shortfall; ++round) {
      for (std::size_t i = 0; i < g_.node_count(); ++i) {
        int leaf = tree_.leaf(static_cast<NodeId>(i));
        int p = tree_.parent(leaf);
        auto& plist = tree_.nodes_[p].children;
        std::size_t slot = static_cast<std::size_t>(
            std::find(plist.begin(), plist.end(), leaf) - plist.begin());
        splice_at(p, slot, true, deltas);
      }
    }
  }
};

CodingTree build_coding_tree(const Graph& g, int k, const BuildOptions& opts) {
  return TreeBuilder(g, k, opts).run();
}

CodingTree build_coding_tree(const Graph& g, int k) {
  BuildOptions opts;
  return build_coding_tree(g, k, opts);
}

}  // namespace sep
