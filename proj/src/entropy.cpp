#include "sep/entropy.hpp"

#include <cmath>
#include <string>

namespace sep {

namespace {

constexpr std::size_t kChunk = 2048;

inline double log_in(LogBase base, double x) {
  return base == LogBase::Two ? std::log2(x) : std::log(x);
}

inline double node_term(const CodingTree& t, int v, double inv_vol) {
  double g = t.cut(v);
  double vol = t.volume(v);
  if (g == 0.0 || vol == 0.0) return 0.0;
  return -(g * inv_vol) * std::log2(vol / t.volume(t.parent(v)));
}

}  // namespace

void validate_tree_for(const Graph& g, const CodingTree& tree) {
  if (g.total_volume() == 0.0)
    throw DomainError("structural entropy is undefined on an edgeless graph (zero volume)");
  if (tree.leaf_count() != g.node_count())
    throw StructuralError("tree leaves do not match graph nodes: " +
                          std::to_string(tree.leaf_count()) + " leaves vs " +
                          std::to_string(g.node_count()) + " nodes");
  for (std::size_t i = 0; i < g.node_count(); ++i) {
    int leaf = tree.leaf(static_cast<NodeId>(i));
    if (!tree.alive(leaf) || tree.graph_node(leaf) != static_cast<int>(i))
      throw StructuralError("tree leaf for graph node " + std::to_string(i) + " is invalid");
  }
}

double total_entropy(const Graph& g, const CodingTree& tree) {
  validate_tree_for(g, tree);
  const double inv_vol = 1.0 / g.total_volume();
  const auto n = static_cast<long>(tree.arena_size());
  const long n_chunks = (n + static_cast<long>(kChunk) - 1) / static_cast<long>(kChunk);
  std::vector<double> partial(n_chunks, 0.0);
#pragma omp parallel for schedule(static)
  for (long c = 0; c < n_chunks; ++c) {
    double s = 0.0;
    long hi = std::min(n, (c + 1) * static_cast<long>(kChunk));
    for (long v = c * static_cast<long>(kChunk); v < hi; ++v)
      if (tree.alive(static_cast<int>(v)) && static_cast<int>(v) != tree.root())
        s += node_term(tree, static_cast<int>(v), inv_vol);
    partial[c] = s;
  }
  double total = 0.0;
  for (double s : partial) total += s;  // fixed order: thread-count independent
  return total;
}

double total_entropy_serial(const Graph& g, const CodingTree& tree) {
  validate_tree_for(g, tree);
  const double inv_vol = 1.0 / g.total_volume();
  double total = 0.0;
  for (std::size_t v = 0; v < tree.arena_size(); ++v)
    if (tree.alive(static_cast<int>(v)) && static_cast<int>(v) != tree.root())
      total += node_term(tree, static_cast<int>(v), inv_vol);
  return total;
}

namespace {

EntropyReport report_from_terms(const CodingTree& tree, std::vector<double> terms,
                                double total) {
  EntropyReport r;
  r.total = total;
  r.per_node_term.reserve(tree.alive_count() - 1);
  for (std::size_t v = 0; v < tree.arena_size(); ++v)
    if (tree.alive(static_cast<int>(v)) && static_cast<int>(v) != tree.root())
      r.per_node_term.emplace_back(static_cast<int>(v), terms[v]);
  return r;
}

}  // namespace

EntropyReport structural_entropy(const Graph& g, const CodingTree& tree) {
  validate_tree_for(g, tree);
  const double inv_vol = 1.0 / g.total_volume();
  const auto n = static_cast<long>(tree.arena_size());
  const long n_chunks = (n + static_cast<long>(kChunk) - 1) / static_cast<long>(kChunk);
  std::vector<double> terms(n, 0.0);
  std::vector<double> partial(n_chunks, 0.0);
#pragma omp parallel for schedule(static)
  for (long c = 0; c < n_chunks; ++c) {
    double s = 0.0;
    long hi = std::min(n, (c + 1) * static_cast<long>(kChunk));
    for (long v = c * static_cast<long>(kChunk); v < hi; ++v) {
      if (!tree.alive(static_cast<int>(v)) || static_cast<int>(v) == tree.root()) continue;
      terms[v] = node_term(tree, static_cast<int>(v), inv_vol);
      s += terms[v];
    }
    partial[c] = s;
  }
  double total = 0.0;
  for (double s : partial) total += s;
  return report_from_terms(tree, std::move(terms), total);
}

EntropyReport structural_entropy_serial(const Graph& g, const CodingTree& tree) {
  validate_tree_for(g, tree);
  const double inv_vol = 1.0 / g.total_volume();
  std::vector<double> terms(tree.arena_size(), 0.0);
  double total = 0.0;
  for (std::size_t v = 0; v < tree.arena_size(); ++v) {
    if (!tree.alive(static_cast<int>(v)) || static_cast<int>(v) == tree.root()) continue;
    terms[v] = node_term(tree, static_cast<int>(v), inv_vol);
    total += terms[v];
  }
  return report_from_terms(tree, std::move(terms), total);
}

nlohmann::ordered_json EntropyReport::to_json() const {
  nlohmann::ordered_json j;
  j["total"] = total;
  nlohmann::ordered_json terms;
  for (const auto& [id, term] : per_node_term) terms[std::to_string(id)] = term;
  j["terms"] = std::move(terms);
  return j;
}

namespace {

// Shared scaffolding for the stats recomputation: depths and nodes
// grouped by depth (deepest group first).
struct LevelPlan {
  std::vector<int> depth;
  std::vector<std::vector<int>> by_depth;  // by_depth[d] = alive nodes at depth d
};

LevelPlan plan_levels(const CodingTree& tree) {
  LevelPlan plan;
  plan.depth = tree.depths();
  int max_depth = 0;
  for (std::size_t v = 0; v < tree.arena_size(); ++v)
    if (tree.alive(static_cast<int>(v))) max_depth = std::max(max_depth, plan.depth[v]);
  plan.by_depth.resize(max_depth + 1);
  for (std::size_t v = 0; v < tree.arena_size(); ++v)
    if (tree.alive(static_cast<int>(v))) plan.by_depth[plan.depth[v]].push_back(static_cast<int>(v));
  return plan;
}

}  // namespace

void recompute_stats(const Graph& g, CodingTree& tree) {
  validate_tree_for(g, tree);
  LevelPlan plan = plan_levels(tree);
  std::vector<double> vol(tree.arena_size(), 0.0);
  std::vector<double> cut(tree.arena_size(), 0.0);

  for (auto it = plan.by_depth.rbegin(); it != plan.by_depth.rend(); ++it) {
    const auto& level = *it;
    const auto sz = static_cast<long>(level.size());
#pragma omp parallel for schedule(static)
    for (long i = 0; i < sz; ++i) {
      int v = level[i];
      if (tree.is_leaf(v)) {
        vol[v] = g.degree(static_cast<NodeId>(tree.graph_node(v)));
      } else {
        double s = 0.0;
        for (int c : tree.children(v)) s += vol[c];
        vol[v] = s;
      }
    }
  }

  const auto m = static_cast<long>(g.edges().size());
  const auto edges = g.edges();
#pragma omp parallel for schedule(static)
  for (long i = 0; i < m; ++i) {
    const Edge& e = edges[i];
    int a = tree.leaf(e.u);
    int b = tree.leaf(e.v);
    // Credit every node strictly below the LCA on both paths.
    while (a != b) {
      if (plan.depth[a] >= plan.depth[b]) {
#pragma omp atomic
        cut[a] += e.w;
        a = tree.parent(a);
      } else {
#pragma omp atomic
        cut[b] += e.w;
        b = tree.parent(b);
      }
    }
  }

  for (std::size_t v = 0; v < tree.arena_size(); ++v)
    if (tree.alive(static_cast<int>(v)))
      tree.set_stats(static_cast<int>(v), {vol[v], cut[v]});
}

void recompute_stats_serial(const Graph& g, CodingTree& tree) {
  validate_tree_for(g, tree);
  LevelPlan plan = plan_levels(tree);
  std::vector<double> vol(tree.arena_size(), 0.0);
  std::vector<double> cut(tree.arena_size(), 0.0);

  for (auto it = plan.by_depth.rbegin(); it != plan.by_depth.rend(); ++it) {
    for (int v : *it) {
      if (tree.is_leaf(v)) {
        vol[v] = g.degree(static_cast<NodeId>(tree.graph_node(v)));
      } else {
        double s = 0.0;
        for (int c : tree.children(v)) s += vol[c];
        vol[v] = s;
      }
    }
  }
  for (const Edge& e : g.edges()) {
    int a = tree.leaf(e.u);
    int b = tree.leaf(e.v);
    while (a != b) {
      if (plan.depth[a] >= plan.depth[b]) {
        cut[a] += e.w;
        a = tree.parent(a);
      } else {
        cut[b] += e.w;
        b = tree.parent(b);
      }
    }
  }
  for (std::size_t v = 0; v < tree.arena_size(); ++v)
    if (tree.alive(static_cast<int>(v)))
      tree.set_stats(static_cast<int>(v), {vol[v], cut[v]});
}

double subtree_link_weight(const Graph& g, const CodingTree& tree, int a, int b) {
  if (tree.volume(a) > tree.volume(b)) std::swap(a, b);
  std::vector<char> in_b(g.node_count(), 0);
  for (NodeId u : tree.leaf_descendants(b)) in_b[u] = 1;
  double w = 0.0;
  for (NodeId u : tree.leaf_descendants(a)) {
    auto nbrs = g.neighbors(u);
    auto wts = g.neighbor_weights(u);
    for (std::size_t i = 0; i < nbrs.size(); ++i)
      if (in_b[nbrs[i]]) w += wts[i];
  }
  return w;
}

double delta_merge(const Graph& g, const CodingTree& tree, int a, int b, LogBase base) {
  if (!tree.alive(a) || !tree.alive(b))
    throw StructuralError("delta_merge: dead node");
  if (a == b || tree.parent(a) != tree.root() || tree.parent(b) != tree.root())
    throw StructuralError("delta_merge: arguments must be two distinct children of the root");
  if (g.total_volume() == 0.0) throw DomainError("delta_merge: zero-volume graph");
  double w = subtree_link_weight(g, tree, a, b);
  if (w == 0.0) return 0.0;
  double vol_merged = tree.volume(a) + tree.volume(b);
  return (2.0 * w / g.total_volume()) * log_in(base, g.total_volume() / vol_merged);
}

double delta_remove(const Graph& g, const CodingTree& tree, int v, LogBase base) {
  if (!tree.alive(v)) throw StructuralError("delta_remove: dead node");
  if (v == tree.root() || tree.is_leaf(v))
    throw StructuralError("delta_remove: argument must be an internal nonroot node");
  if (g.total_volume() == 0.0) throw DomainError("delta_remove: zero-volume graph");
  double child_cut_sum = 0.0;
  for (int c : tree.children(v)) child_cut_sum += tree.cut(c);
  double coef = tree.cut(v) - child_cut_sum;
  if (coef == 0.0) return 0.0;
  return (coef / g.total_volume()) *
         log_in(base, tree.volume(v) / tree.volume(tree.parent(v)));
}

}  // namespace sep
