#include "doctest.h"

#include "sep/generators.hpp"
#include "sep/graph_io.hpp"
#include "sep/pooling.hpp"
#include "sep/tree_builder.hpp"
#include "support.hpp"

using namespace sep;

namespace {

ClusterAssignment pairs_of_four() {
  // clusters {0,1} and {2,3}
  ClusterAssignment s;
  s.level = 1;
  s.rows = 2;
  s.cols = 4;
  s.cluster_of = {0, 0, 1, 1};
  return s;
}

ClusterAssignment identity_assignment(std::size_t n) {
  ClusterAssignment s;
  s.level = 1;
  s.rows = s.cols = n;
  s.cluster_of.resize(n);
  for (std::uint32_t i = 0; i < n; ++i) s.cluster_of[i] = i;
  return s;
}

FeatureMatrix column(std::vector<double> vals) {
  FeatureMatrix m(vals.size(), 1);
  for (std::size_t i = 0; i < vals.size(); ++i) m.at(i, 0) = vals[i];
  return m;
}

// reference triple product over dense matrices
std::vector<std::vector<double>> dense_sas(const std::vector<std::vector<double>>& s,
                                           const std::vector<std::vector<double>>& a) {
  std::size_t r = s.size(), n = a.size();
  std::vector<std::vector<double>> sa(r, std::vector<double>(n, 0.0));
  for (std::size_t p = 0; p < r; ++p)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) sa[p][j] += s[p][i] * a[i][j];
  std::vector<std::vector<double>> out(r, std::vector<double>(r, 0.0));
  for (std::size_t p = 0; p < r; ++p)
    for (std::size_t q = 0; q < r; ++q)
      for (std::size_t j = 0; j < n; ++j) out[p][q] += sa[p][j] * s[q][j];
  return out;
}

}  // namespace

TEST_CASE("assignments of a star tree: one all-ones row") {
  auto [c4, f] = make_ring(4);
  CodingTree star = CodingTree::star(c4);
  auto assignments = assignments_from_tree(star);
  REQUIRE(assignments.size() == 1);
  CHECK(assignments[0].rows == 1);
  CHECK(assignments[0].cols == 4);
  for (auto c : assignments[0].cluster_of) CHECK(c == 0);
}

TEST_CASE("assignments of the two-node tree at height two") {
  Graph k2 = parse_edge_list("0 1\n");
  CodingTree t = build_coding_tree(k2, 2);
  auto assignments = assignments_from_tree(t);
  REQUIRE(assignments.size() == 2);
  // chain padding keeps both nodes separate at level 1, then joins them
  CHECK(assignments[0].rows == 2);
  CHECK(assignments[0].cols == 2);
  CHECK(assignments[1].rows == 1);
  CHECK(assignments[1].cols == 2);
  // composing all levels maps every node to the single root cluster
  std::vector<std::uint32_t> cluster(2);
  for (std::uint32_t v = 0; v < 2; ++v)
    cluster[v] = assignments[1].cluster_of[assignments[0].cluster_of[v]];
  CHECK(cluster == std::vector<std::uint32_t>{0, 0});
}

TEST_CASE("assignments of the C4 build match the pinned clusters") {
  auto [c4, f] = make_ring(4);
  CodingTree t = build_coding_tree(c4, 2);
  auto assignments = assignments_from_tree(t);
  REQUIRE(assignments.size() == 2);
  const auto& s1 = assignments[0];
  CHECK(s1.rows == 2);
  CHECK(s1.cols == 4);
  std::vector<std::size_t> row_sums(s1.rows, 0);
  for (auto c : s1.cluster_of) ++row_sums[c];
  CHECK(row_sums == std::vector<std::size_t>{2, 2});
  CHECK(s1.cluster_of == std::vector<std::uint32_t>{0, 0, 1, 1});
}

TEST_CASE("assignments refuse trees with leaves at unequal depths") {
  Graph k3 = parse_edge_list("0 1\n1 2\n");
  CodingTree t = CodingTree::star(k3);
  t.merge(k3, t.leaf(0), t.leaf(1));  // leaf 2 stays at depth 1
  CHECK_THROWS_AS(assignments_from_tree(t), StructuralError);
}

TEST_CASE("pooling with the identity assignment is a no-op") {
  auto [c4, features] = make_ring(4);
  PoolingLevel level{CsrMatrix::from_graph(c4), features};
  PoolingLevel pooled = pool(level, identity_assignment(4));
  CHECK(pooled.adjacency.dense() == level.adjacency.dense());
  CHECK(pooled.features == level.features);
  PoolingLevel up = unpool(level, identity_assignment(4));
  CHECK(up.adjacency.dense() == level.adjacency.dense());
  CHECK(up.features == level.features);
}

TEST_CASE("pooled C4 collapses to the pinned 2x2 matrix") {
  auto [c4, f] = make_ring(4);
  ClusterAssignment s = pairs_of_four();
  CsrMatrix pooled = pool_adjacency(CsrMatrix::from_graph(c4), s);
  std::vector<std::vector<double>> want{{2.0, 2.0}, {2.0, 2.0}};
  CHECK(pooled.dense() == want);
  // and agrees with the dense triple product
  CHECK(pooled.dense() == dense_sas(s.dense(), CsrMatrix::from_graph(c4).dense()));
}

TEST_CASE("feature pooling sums, means, and broadcasts") {
  ClusterAssignment s = pairs_of_four();
  FeatureMatrix x = column({1, 2, 3, 4});
  FeatureMatrix sums = pool_features(x, s);
  CHECK(sums == column({3, 7}));
  FeatureMatrix means = pool_features(x, s, Aggregation::Mean);
  CHECK(means == column({1.5, 3.5}));
  CHECK(unpool_features(sums, s) == column({3, 3, 7, 7}));
}

TEST_CASE("one-hot columns make the assignment gram matrix diag(cluster sizes)") {
  ClusterAssignment s = pairs_of_four();
  auto d = s.dense();
  // row p of S dotted with row q: S S^T
  for (std::size_t p = 0; p < s.rows; ++p)
    for (std::size_t q = 0; q < s.rows; ++q) {
      double dot = 0.0;
      for (std::size_t j = 0; j < s.cols; ++j) dot += d[p][j] * d[q][j];
      CHECK(dot == (p == q ? 2.0 : 0.0));
    }
}

TEST_CASE("shape mismatches are rejected") {
  auto [c4, features] = make_ring(4);
  ClusterAssignment wrong = identity_assignment(3);
  CHECK_THROWS_AS(pool_adjacency(CsrMatrix::from_graph(c4), wrong), ShapeError);
  CHECK_THROWS_AS(pool_features(features, wrong), ShapeError);
  CHECK_THROWS_AS(unpool_features(features, identity_assignment(3)), ShapeError);
}

TEST_CASE("pooling conserves volume and symmetry across random builds") {
  std::mt19937_64 rng(51);
  for (int trial = 0; trial < 10; ++trial) {
    Graph g = test_support::random_unit_graph(20, 0.2, rng);
    CodingTree t = build_coding_tree(g, 3);
    auto assignments = assignments_from_tree(t);
    PoolingLevel level{CsrMatrix::from_graph(g), FeatureMatrix(g.node_count(), 1, 1.0)};
    double volume = level.adjacency.sum();
    for (const auto& s : assignments) {
      // one-hot column property
      CHECK(s.cluster_of.size() == s.cols);
      for (auto c : s.cluster_of) CHECK(c < s.rows);
      level = pool(level, s);
      CHECK(level.adjacency.sum() == volume);  // exact: integer weights
      CHECK(level.adjacency.symmetric(1e-12));
    }
    CHECK(level.adjacency.rows == 1);
  }
}

TEST_CASE("the pooling algebra is permutation equivariant") {
  std::mt19937_64 rng(52);
  Graph g = test_support::random_weighted_graph(12, 0.4, rng);
  CodingTree t = build_coding_tree(g, 2);
  auto s = assignments_from_tree(t)[0];
  FeatureMatrix x(g.node_count(), 2);
  for (std::size_t i = 0; i < x.rows(); ++i)
    for (std::size_t c = 0; c < 2; ++c) x.at(i, c) = test_support::uniform01(rng);

  std::vector<NodeId> perm(g.node_count());
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = static_cast<NodeId>(i);
  for (std::size_t i = perm.size(); i > 1; --i)
    std::swap(perm[i - 1], perm[static_cast<std::size_t>(test_support::uniform01(rng) * i)]);

  Graph gp = test_support::permute_graph(g, perm);
  FeatureMatrix xp(x.rows(), x.cols());
  ClusterAssignment sp = s;
  for (std::size_t i = 0; i < perm.size(); ++i) {
    sp.cluster_of[perm[i]] = s.cluster_of[i];
    for (std::size_t c = 0; c < x.cols(); ++c) xp.at(perm[i], c) = x.at(i, c);
  }

  PoolingLevel base{CsrMatrix::from_graph(g), x};
  PoolingLevel permuted{CsrMatrix::from_graph(gp), xp};
  PoolingLevel a = pool(base, s);
  PoolingLevel b = pool(permuted, sp);
  auto da = a.adjacency.dense();
  auto db = b.adjacency.dense();
  REQUIRE(da.size() == db.size());
  for (std::size_t i = 0; i < da.size(); ++i)
    for (std::size_t j = 0; j < da.size(); ++j)
      CHECK(da[i][j] == doctest::Approx(db[i][j]).epsilon(1e-12));
  for (std::size_t i = 0; i < a.features.rows(); ++i)
    for (std::size_t c = 0; c < a.features.cols(); ++c)
      CHECK(a.features.at(i, c) == doctest::Approx(b.features.at(i, c)).epsilon(1e-12));
}

TEST_CASE("mean round trip is a projection") {
  std::mt19937_64 rng(53);
  Graph g = test_support::random_unit_graph(16, 0.25, rng);
  CodingTree t = build_coding_tree(g, 3);
  auto assignments = assignments_from_tree(t);
  std::span<const ClusterAssignment> levels(assignments.data(), assignments.size() - 1);
  FeatureMatrix x(g.node_count(), 3);
  for (std::size_t i = 0; i < x.rows(); ++i)
    for (std::size_t c = 0; c < 3; ++c) x.at(i, c) = test_support::uniform01(rng);
  FeatureMatrix once = round_trip_features(x, levels, Aggregation::Mean);
  FeatureMatrix twice = round_trip_features(once, levels, Aggregation::Mean);
  for (std::size_t i = 0; i < x.rows(); ++i)
    for (std::size_t c = 0; c < 3; ++c)
      CHECK(once.at(i, c) == doctest::Approx(twice.at(i, c)).epsilon(1e-12));
}

TEST_CASE("round trip through singleton clusters reconstructs exactly") {
  Graph k2 = parse_edge_list("0 1\n");
  FeatureMatrix x = column({4.0, 9.0});
  // height-2 tree over two nodes keeps singletons at level 1
  CHECK(reconstruct_metric(k2, x, 2, Aggregation::Mean) == doctest::Approx(0.0));
  CHECK(reconstruct_metric(k2, x, 2, Aggregation::Sum) == doctest::Approx(0.0));
}

TEST_CASE("structured clusters beat size-matched random partitions on the ring") {
  auto [ring, coords] = make_ring(64);
  double sep_mse = reconstruct_metric(ring, coords, 2, Aggregation::Mean);

  CodingTree t = build_coding_tree(ring, 2);
  auto s1 = assignments_from_tree(t)[0];
  std::mt19937_64 rng(54);
  int below = 0;
  const int trials = 20;
  for (int i = 0; i < trials; ++i) {
    ClusterAssignment random_s = test_support::random_assignment_like(s1, rng);
    std::vector<ClusterAssignment> levels{random_s};
    FeatureMatrix rt = round_trip_features(coords, levels, Aggregation::Mean);
    if (sep_mse < mean_squared_error(coords, rt)) ++below;
  }
  CHECK(below == trials);  // dominance, smoke-sized; the acceptance suite runs 100
}

TEST_CASE("assignment export formats are pinned") {
  ClusterAssignment s = pairs_of_four();
  CHECK(format_assignment_csv(s) ==
        "level,cluster,node\n1,0,0\n1,0,1\n1,1,2\n1,1,3\n");
  CHECK(format_assignment_matrix_market(s) ==
        "%%MatrixMarket matrix coordinate integer general\n"
        "2 4 4\n1 1 1\n1 2 1\n2 3 1\n2 4 1\n");
  auto [c4, f] = make_ring(4);
  CsrMatrix pooled = pool_adjacency(CsrMatrix::from_graph(c4), s);
  CHECK(format_pooled_edge_list(pooled) == "0 0 2\n0 1 2\n1 1 2\n");
}
