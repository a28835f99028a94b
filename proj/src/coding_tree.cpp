#include "sep/coding_tree.hpp"

#include <algorithm>
#include <map>
#include <string>

namespace sep {

int CodingTree::new_node() {
  nodes_.emplace_back();
  ++alive_count_;
  return static_cast<int>(nodes_.size()) - 1;
}

void CodingTree::check_alive(int v, const char* who) const {
  if (!alive(v)) throw StructuralError(std::string(who) + ": node id " + std::to_string(v) + " is not a live tree node");
}

CodingTree CodingTree::star(const Graph& g) {
  CodingTree t;
  std::size_t n = g.node_count();
  t.nodes_.reserve(n + 1);
  t.leaf_of_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    int v = t.new_node();
    t.nodes_[v].graph_node = static_cast<int>(i);
    t.nodes_[v].min_leaf = static_cast<int>(i);
    // A leaf's cut equals its weighted degree: every incident edge leaves.
    t.nodes_[v].stats = {g.degree(static_cast<NodeId>(i)), g.degree(static_cast<NodeId>(i))};
    t.leaf_of_[i] = v;
  }
  t.root_ = t.new_node();
  Node& r = t.nodes_[t.root_];
  r.stats = {g.total_volume(), 0.0};
  r.min_leaf = n > 0 ? 0 : std::numeric_limits<int>::max();
  r.height = n > 0 ? 1 : 0;
  r.children.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    r.children[i] = t.leaf_of_[i];
    t.nodes_[t.leaf_of_[i]].parent = t.root_;
  }
  return t;
}

CodingTree CodingTree::from_parents(const Graph& g, const std::vector<int>& parent,
                                    const std::vector<int>& leaf_graph_node) {
  if (parent.size() != leaf_graph_node.size())
    throw StructuralError("from_parents: parent/leaf arrays differ in length");
  CodingTree t;
  std::size_t n_nodes = parent.size();
  t.nodes_.resize(n_nodes);
  t.alive_count_ = n_nodes;
  t.leaf_of_.assign(g.node_count(), npos);
  for (std::size_t v = 0; v < n_nodes; ++v) {
    t.nodes_[v].parent = parent[v];
    t.nodes_[v].graph_node = leaf_graph_node[v];
    if (parent[v] == npos) {
      if (t.root_ != npos) throw StructuralError("from_parents: multiple roots");
      t.root_ = static_cast<int>(v);
    } else {
      if (parent[v] < 0 || parent[v] >= static_cast<int>(n_nodes))
        throw StructuralError("from_parents: parent id out of range");
      t.nodes_[parent[v]].children.push_back(static_cast<int>(v));
    }
    if (leaf_graph_node[v] != npos) {
      if (leaf_graph_node[v] < 0 || leaf_graph_node[v] >= static_cast<int>(g.node_count()))
        throw StructuralError("from_parents: leaf graph node out of range");
      if (t.leaf_of_[leaf_graph_node[v]] != npos)
        throw StructuralError("from_parents: duplicate leaf for graph node " +
                              std::to_string(leaf_graph_node[v]));
      t.leaf_of_[leaf_graph_node[v]] = static_cast<int>(v);
    }
  }
  if (t.root_ == npos) throw StructuralError("from_parents: no root");
  for (std::size_t i = 0; i < g.node_count(); ++i)
    if (t.leaf_of_[i] == npos)
      throw StructuralError("from_parents: graph node " + std::to_string(i) + " has no leaf");
  for (std::size_t v = 0; v < n_nodes; ++v)
    if (t.nodes_[v].graph_node != npos && !t.nodes_[v].children.empty())
      throw StructuralError("from_parents: leaf with children");
  for (std::size_t v = 0; v < n_nodes; ++v)
    if (t.nodes_[v].graph_node == npos && t.nodes_[v].children.empty())
      throw StructuralError("from_parents: internal node without children");

  // Derive min_leaf and heights; also detects cycles (a cycle leaves
  // some node unresolved).
  std::vector<int> order;
  order.reserve(n_nodes);
  std::vector<int> pending(n_nodes, 0);
  for (std::size_t v = 0; v < n_nodes; ++v) {
    pending[v] = static_cast<int>(t.nodes_[v].children.size());
    if (pending[v] == 0) order.push_back(static_cast<int>(v));
  }
  for (std::size_t head = 0; head < order.size(); ++head) {
    int v = order[head];
    Node& node = t.nodes_[v];
    if (node.graph_node != npos) {
      node.min_leaf = node.graph_node;
      node.height = 0;
    } else {
      node.min_leaf = std::numeric_limits<int>::max();
      node.height = 0;
      for (int c : node.children) {
        node.min_leaf = std::min(node.min_leaf, t.nodes_[c].min_leaf);
        node.height = std::max(node.height, t.nodes_[c].height + 1);
      }
    }
    if (node.parent != npos && --pending[node.parent] == 0)
      order.push_back(node.parent);
  }
  if (order.size() != n_nodes) throw StructuralError("from_parents: cycle detected");
  for (std::size_t v = 0; v < n_nodes; ++v) {
    auto& list = t.nodes_[v].children;
    std::sort(list.begin(), list.end(),
              [&](int a, int b) { return t.nodes_[a].min_leaf < t.nodes_[b].min_leaf; });
  }
  return t;
}

std::vector<int> CodingTree::depths() const {
  std::vector<int> d(nodes_.size(), npos);
  if (root_ == npos) return d;
  d[root_] = 0;
  std::vector<int> stack{root_};
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    for (int c : nodes_[v].children) {
      d[c] = d[v] + 1;
      stack.push_back(c);
    }
  }
  return d;
}

std::vector<NodeId> CodingTree::leaf_descendants(int v) const {
  check_alive(v, "leaf_descendants");
  std::vector<NodeId> out;
  std::vector<int> stack{v};
  while (!stack.empty()) {
    int u = stack.back();
    stack.pop_back();
    if (nodes_[u].graph_node != npos)
      out.push_back(static_cast<NodeId>(nodes_[u].graph_node));
    else
      for (int c : nodes_[u].children) stack.push_back(c);
  }
  std::sort(out.begin(), out.end());
  return out;
}

int CodingTree::child_height_max(int v) const {
  int h = -1;
  for (int c : nodes_[v].children) h = std::max(h, nodes_[c].height);
  return h;
}

void CodingTree::refresh_heights_upward(int v) {
  while (v != npos) {
    int h = child_height_max(v) + 1;
    if (nodes_[v].height == h) break;
    nodes_[v].height = h;
    v = nodes_[v].parent;
  }
}

void CodingTree::insert_sorted_child(std::vector<int>& list, int child,
                                     const std::vector<Node>& nodes) {
  auto it = std::lower_bound(list.begin(), list.end(), child, [&](int a, int b) {
    return nodes[a].min_leaf < nodes[b].min_leaf;
  });
  list.insert(it, child);
}

int CodingTree::merge(const Graph& g, int a, int b) {
  check_alive(a, "merge");
  check_alive(b, "merge");
  if (a == b) throw StructuralError("merge: the two nodes must be distinct");
  if (nodes_[a].parent != root_ || nodes_[b].parent != root_)
    throw StructuralError("merge: both nodes must be children of the root");

  // Total edge weight between the two leaf sets, scanning the smaller
  // subtree's adjacency against a membership mark of the other.
  if (volume(a) > volume(b)) std::swap(a, b);
  std::vector<char> in_b(g.node_count(), 0);
  for (NodeId u : leaf_descendants(b)) in_b[u] = 1;
  double w_ab = 0.0;
  for (NodeId u : leaf_descendants(a)) {
    auto nbrs = g.neighbors(u);
    auto wts = g.neighbor_weights(u);
    for (std::size_t i = 0; i < nbrs.size(); ++i)
      if (in_b[nbrs[i]]) w_ab += wts[i];
  }

  int eps = new_node();
  Node& e = nodes_[eps];
  e.parent = root_;
  e.stats = {volume(a) + volume(b), cut(a) + cut(b) - 2.0 * w_ab};
  e.min_leaf = std::min(min_leaf(a), min_leaf(b));
  e.height = std::max(height(a), height(b)) + 1;
  e.children = min_leaf(a) <= min_leaf(b) ? std::vector<int>{a, b} : std::vector<int>{b, a};

  auto& rc = nodes_[root_].children;
  std::erase(rc, a);
  std::erase(rc, b);
  insert_sorted_child(rc, eps, nodes_);
  nodes_[a].parent = eps;
  nodes_[b].parent = eps;
  refresh_heights_upward(root_);
  return eps;
}

void CodingTree::remove(int v) {
  check_alive(v, "remove");
  if (v == root_) throw StructuralError("remove: cannot remove the root");
  if (is_leaf(v)) throw StructuralError("remove: cannot remove a leaf");
  int p = nodes_[v].parent;
  auto& plist = nodes_[p].children;
  std::erase(plist, v);
  for (int c : nodes_[v].children) {
    nodes_[c].parent = p;
    insert_sorted_child(plist, c, nodes_);
  }
  nodes_[v].alive = false;
  nodes_[v].children.clear();
  --alive_count_;
  refresh_heights_upward(p);
}

int CodingTree::splice_above(int v) {
  int p = nodes_[v].parent;
  int eps = new_node();
  Node& e = nodes_[eps];
  e.parent = p;
  e.children = {v};
  e.stats = nodes_[v].stats;
  e.min_leaf = nodes_[v].min_leaf;
  e.height = nodes_[v].height + 1;
  auto& plist = nodes_[p].children;
  *std::find(plist.begin(), plist.end(), v) = eps;  // same slot, same order
  nodes_[v].parent = eps;
  refresh_heights_upward(p);
  return eps;
}

int CodingTree::fill(int v) {
  check_alive(v, "fill");
  if (v == root_) throw StructuralError("fill: the root has no parent link to fill");
  int p = nodes_[v].parent;
  if (height(p) - height(v) <= 1)
    throw StructuralError("fill: no cross-layer link above node " + std::to_string(v) +
                          " (height gap must exceed 1)");
  return splice_above(v);
}

bool CodingTree::layered() const {
  for (std::size_t v = 0; v < nodes_.size(); ++v) {
    if (!nodes_[v].alive || static_cast<int>(v) == root_) continue;
    if (nodes_[nodes_[v].parent].height != nodes_[v].height + 1) return false;
  }
  return true;
}

void CodingTree::canonicalize() {
  if (root_ == npos) return;
  for (auto& node : nodes_) {
    if (!node.alive) continue;
    std::sort(node.children.begin(), node.children.end(),
              [&](int a, int b) { return nodes_[a].min_leaf < nodes_[b].min_leaf; });
  }
  std::vector<int> order;  // BFS over canonical child order
  order.reserve(alive_count_);
  order.push_back(root_);
  for (std::size_t head = 0; head < order.size(); ++head)
    for (int c : nodes_[order[head]].children) order.push_back(c);

  std::vector<int> new_id(nodes_.size(), npos);
  for (std::size_t i = 0; i < order.size(); ++i) new_id[order[i]] = static_cast<int>(i);

  std::vector<Node> compact(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    Node& src = nodes_[order[i]];
    Node& dst = compact[i];
    dst = std::move(src);
    if (dst.parent != npos) dst.parent = new_id[dst.parent];
    for (int& c : dst.children) c = new_id[c];
  }
  nodes_ = std::move(compact);
  root_ = new_id[root_];
  for (auto& l : leaf_of_) l = new_id[l];
  alive_count_ = nodes_.size();
}

nlohmann::ordered_json CodingTree::to_json() const {
  nlohmann::ordered_json j;
  j["height"] = height();
  auto nodes = nlohmann::ordered_json::array();
  for (std::size_t v = 0; v < nodes_.size(); ++v) {
    if (!nodes_[v].alive) continue;
    nlohmann::ordered_json nj;
    nj["id"] = v;
    if (static_cast<int>(v) == root_)
      nj["parent"] = nullptr;
    else
      nj["parent"] = nodes_[v].parent;
    nj["children"] = nodes_[v].children;
    nj["vol"] = nodes_[v].stats.volume;
    nj["cut"] = nodes_[v].stats.cut;
    nodes.push_back(std::move(nj));
  }
  j["nodes"] = std::move(nodes);
  nlohmann::ordered_json leaf_of;
  for (std::size_t i = 0; i < leaf_of_.size(); ++i)
    leaf_of[std::to_string(i)] = leaf_of_[i];
  j["leaf_of"] = std::move(leaf_of);
  return j;
}

CodingTree CodingTree::from_json(const Graph& g, const nlohmann::json& j) {
  if (!j.contains("nodes") || !j.contains("leaf_of"))
    throw ParseError("tree json: missing 'nodes' or 'leaf_of'");
  std::map<int, std::pair<int, NodeStats>> parsed;  // id -> (parent, stats)
  int max_id = -1;
  for (const auto& nj : j.at("nodes")) {
    int id = nj.at("id").get<int>();
    int parent = nj.at("parent").is_null() ? npos : nj.at("parent").get<int>();
    NodeStats s{nj.at("vol").get<double>(), nj.at("cut").get<double>()};
    if (id < 0) throw ParseError("tree json: negative node id");
    if (!parsed.emplace(id, std::make_pair(parent, s)).second)
      throw ParseError("tree json: duplicate node id " + std::to_string(id));
    max_id = std::max(max_id, id);
  }
  std::vector<int> parent(max_id + 1, npos);
  std::vector<int> leaf_graph(max_id + 1, npos);
  std::vector<char> present(max_id + 1, 0);
  for (const auto& [id, ps] : parsed) {
    parent[id] = ps.first;
    present[id] = 1;
  }
  for (const auto& [key, val] : j.at("leaf_of").items()) {
    int graph_node = std::stoi(key);
    int leaf_id = val.get<int>();
    if (leaf_id < 0 || leaf_id > max_id || !present[leaf_id])
      throw ParseError("tree json: leaf_of points at unknown node");
    leaf_graph[leaf_id] = graph_node;
  }
  // Compact away unused ids so from_parents sees a dense arena.
  std::vector<int> dense_of(max_id + 1, npos);
  int n_dense = 0;
  for (int id = 0; id <= max_id; ++id)
    if (present[id]) dense_of[id] = n_dense++;
  std::vector<int> dparent(n_dense, npos);
  std::vector<int> dleaf(n_dense, npos);
  for (int id = 0; id <= max_id; ++id) {
    if (!present[id]) continue;
    int p = parent[id];
    if (p != npos && (p > max_id || !present[p]))
      throw ParseError("tree json: parent points at unknown node");
    dparent[dense_of[id]] = p == npos ? npos : dense_of[p];
    dleaf[dense_of[id]] = leaf_graph[id];
  }
  CodingTree t = from_parents(g, dparent, dleaf);
  for (const auto& [id, ps] : parsed) t.set_stats(dense_of[id], ps.second);
  t.canonicalize();
  return t;
}

}  // namespace sep
