#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "fkrc/clustergeo.hpp"

using namespace fkrc;

namespace {

const DirectionalNorm kEuclid = DirectionalNorm::euclidean(2);
const Vec kE1{1.0, 0.0};

// Builds a nearest-neighbour cluster from sites, linking every adjacent pair.
Cluster lattice_cluster(const std::vector<Site>& sites, const Site& o, const Site& x) {
  std::vector<Cluster::Edge> edges;
  for (std::size_t i = 0; i < sites.size(); ++i)
    for (std::size_t j = i + 1; j < sites.size(); ++j)
      if ((sites[i] - sites[j]).norm2() == 1) edges.emplace_back(i, j);
  return Cluster(sites, edges, o, x);
}

Cluster line(int len) {
  std::vector<Site> s;
  for (int i = 0; i <= len; ++i) s.push_back({i, 0});
  return lattice_cluster(s, {0, 0}, {len, 0});
}

Cluster tee(int len, int spur) {
  std::vector<Site> s;
  for (int i = 0; i <= len; ++i) s.push_back({i, 0});
  for (int j = 1; j <= spur; ++j) s.push_back({len / 2, j});
  return lattice_cluster(s, {0, 0}, {len, 0});
}

std::vector<Cluster> sampled_clusters(double p, int n, std::size_t count, std::uint64_t seed) {
  auto g = make_graph(Box::cube(2, n), CouplingField::nearest_neighbor(2));
  ChainSettings s;
  s.burn_in = 50;
  s.n_samples = count;
  s.thinning = 3;
  s.seed = seed;
  std::vector<Cluster> out;
  for (const auto& omega : sample_chain(g, {beta_from_probability(p), 1.0}, BoundaryCondition::free, s)) {
    Cluster probe = extract_cluster(omega, {0, 0}, {0, 0});
    // the target is the vertex of largest first coordinate
    std::size_t best = 0;
    for (std::size_t i = 0; i < probe.size(); ++i)
      if (probe.vertex(i)[0] > probe.vertex(best)[0]) best = i;
    out.push_back(extract_cluster(omega, {0, 0}, probe.vertex(best)));
  }
  return out;
}

}  // namespace

TEST(Cluster, RejectsDisconnectedAndForeignEndpoints) {
  EXPECT_THROW(lattice_cluster({{0, 0}, {2, 0}}, {0, 0}, {2, 0}), Error);
  EXPECT_THROW(lattice_cluster({{0, 0}, {1, 0}}, {0, 0}, {3, 0}), Error);
  EXPECT_EQ(line(4).size(), 5u);
}

TEST(ExtractCluster, FollowsOpenBonds) {
  auto g = make_graph(Box::cube(2, 2), CouplingField::nearest_neighbor(2));
  BondConfiguration w(g, BoundaryCondition::free);
  w.open[g->bond_index(static_cast<std::uint32_t>(g->box().index({0, 0})),
                       static_cast<std::uint32_t>(g->box().index({1, 0})))] = 1;
  const Cluster c = extract_cluster(w, {0, 0}, {1, 0});
  EXPECT_EQ(c.size(), 2u);
  EXPECT_EQ(c.edges().size(), 1u);
  EXPECT_THROW(extract_cluster(w, {0, 0}, {2, 0}), Error);
}

TEST(Skeleton, SmallClusterIsSingleVertex) {
  const auto tree = skeleton(line(5), 8, 1, kEuclid);
  EXPECT_EQ(tree.size(), 1u);
  EXPECT_EQ(tree.trunk, std::vector<std::size_t>{0});
  EXPECT_TRUE(tree.branches.empty());
}

TEST(Skeleton, LineGivesCollinearTrunk) {
  // padded radius 8 + log 8 = 10.08, so vertices sit 11 apart and stop once
  // fewer than K + 1 sites remain ahead: 0, 11, ..., 88
  const auto tree = skeleton(line(100), 8, 1, kEuclid);
  ASSERT_EQ(tree.size(), 9u);
  for (std::size_t i = 0; i < tree.size(); ++i) {
    EXPECT_EQ(tree.vertices[i], (Site{11 * static_cast<int>(i), 0}));
    if (i > 0) {
      EXPECT_EQ(tree.parent[i], static_cast<std::ptrdiff_t>(i - 1));
    }
  }
  EXPECT_EQ(tree.trunk.size(), 9u);
  EXPECT_TRUE(tree.branches.empty());
}

TEST(Skeleton, TeeHasOneBranchAtTheSpur) {
  const auto tree = skeleton(tee(100, 24), 8, 1, kEuclid);
  const std::vector<Site> expect{{0, 0},  {11, 0}, {22, 0}, {33, 0}, {44, 0},
                                 {50, 9}, {55, 0}, {66, 0}, {77, 0}, {88, 0}};
  ASSERT_EQ(tree.vertices, expect);
  EXPECT_EQ(tree.parent[5], 4);
  EXPECT_EQ(tree.parent[6], 4);
  EXPECT_EQ(tree.trunk, (std::vector<std::size_t>{0, 1, 2, 3, 4, 6, 7, 8, 9}));
  ASSERT_EQ(tree.branches.size(), 1u);
  EXPECT_EQ(tree.branches[0].root, 4u);
  EXPECT_EQ(tree.branches[0].vertices, std::vector<std::size_t>{5});
  EXPECT_EQ(tree.size(), tree.trunk.size() + tree.branch_vertex_count());
}

TEST(Skeleton, RejectsSmallScale) { EXPECT_THROW(skeleton(line(3), 0.5, 1, kEuclid), Error); }

TEST(SplitTrunk, TargetNotCovered) {
  SkeletonTree tree;
  tree.vertices = {{0, 0}};
  tree.parent = {-1};
  tree.K = 2;
  tree.r = 0;
  EXPECT_EQ(split_trunk_branches(tree, {1, 0}, kEuclid).first, std::vector<std::size_t>{0});
  EXPECT_THROW(split_trunk_branches(tree, {50, 0}, kEuclid), Error);
}

TEST(TrunkConePoints, CollinearTrunkHasNoMarks) {
  std::vector<Site> trunk;
  for (int i = 0; i < 6; ++i) trunk.push_back({10 * i, 0});
  const auto res = trunk_cone_points(trunk, kE1, 0.1, kEuclid);
  EXPECT_EQ(res.cone.size(), 6u);
  EXPECT_TRUE(res.marked.empty());
}

TEST(TrunkConePoints, ZigzagIsMarked) {
  // delta = 0.2: w is in the forward cone iff w1 > 0.8 |w|; (15, 12) and
  // (5, +-12) are outside. Forward scan marks 0..2, backward scan 2..4.
  const std::vector<Site> trunk{{0, 0}, {10, 0}, {15, 12}, {20, 0}, {30, 0}, {40, 0}};
  const auto res = trunk_cone_points(trunk, kE1, 0.2, kEuclid);
  EXPECT_EQ(res.marked, (std::vector<std::size_t>{0, 1, 2, 3, 4}));
  EXPECT_EQ(res.cone, std::vector<std::size_t>{5});
}

TEST(TrunkConePoints, TwoVertices) {
  const auto in = trunk_cone_points({{0, 0}, {5, 1}}, kE1, 0.1, kEuclid);
  EXPECT_EQ(in.cone, (std::vector<std::size_t>{0, 1}));
  const auto out = trunk_cone_points({{0, 0}, {1, 5}}, kE1, 0.1, kEuclid);
  EXPECT_TRUE(out.cone.empty());
  EXPECT_EQ(out.marked, (std::vector<std::size_t>{0, 1}));
}

TEST(TreeConePoints, BranchlessMatchesTrunkAtDoubleOpening) {
  const auto tree = skeleton(line(100), 8, 1, kEuclid);
  EXPECT_EQ(tree_cone_points(tree, kE1, 0.1, kEuclid), trunk_cone_points(tree.trunk_sites(), kE1, 0.2, kEuclid).cone);
  SkeletonTree two;
  two.vertices = {{0, 0}, {6, 2}};
  two.parent = {-1, 0};
  two.trunk = {0, 1};
  EXPECT_EQ(tree_cone_points(two, kE1, 0.1, kEuclid), trunk_cone_points(two.vertices, kE1, 0.2, kEuclid).cone);
}

TEST(TreeConePoints, SpurBlocksNearbyTrunkVertices) {
  const auto tree = skeleton(tee(100, 24), 8, 1, kEuclid);
  const auto cones = tree_cone_points(tree, kE1, 0.1, kEuclid);
  const std::set<std::size_t> s(cones.begin(), cones.end());
  EXPECT_TRUE(s.count(0));   // (50, 9) seen from the origin is nearly horizontal
  EXPECT_FALSE(s.count(4));  // (6, 9) from (44, 0) leaves the double cone
  EXPECT_FALSE(s.count(5));  // (-5, 9) from (55, 0)
  EXPECT_TRUE(trunk_cone_points(tree.trunk_sites(), kE1, 0.2, kEuclid).cone.size() > cones.size());
}

TEST(ClusterConePoints, LineAndSingleVertex) {
  EXPECT_EQ(cluster_cone_points(line(7), kE1, 0.1, kEuclid).size(), 8u);
  const Cluster one({{0, 0}}, {}, {0, 0}, {0, 0});
  EXPECT_EQ(cluster_cone_points(one, kE1, 0.1, kEuclid), std::vector<std::size_t>{0});
  // (1, 3) - (1, 0) is vertical, so (1, 0) is excluded
  const Cluster bump = lattice_cluster({{0, 0}, {1, 0}, {2, 0}, {1, 1}, {1, 2}, {1, 3}}, {0, 0}, {2, 0});
  const auto c = cluster_cone_points(bump, kE1, 0.1, kEuclid);
  EXPECT_EQ(std::count(c.begin(), c.end(), *bump.find({1, 0})), 0);
}

TEST(ClusterConePoints, AcceleratedMatchesBruteForce) {
  const auto quad = DirectionalNorm::quadratic((Eigen::MatrixXd(2, 2) << 1.3, 0.2, 0.2, 0.8).finished());
  const Vec tq = dual_vector(kE1, quad);
  std::size_t nonempty = 0;
  for (const auto& c : sampled_clusters(0.45, 14, 150, 11)) {
    for (double delta : {0.05, 0.1, 0.2, 0.3}) {
      EXPECT_EQ(cluster_cone_points(c, kE1, delta, kEuclid, ConeSearch::accelerated),
                cluster_cone_points(c, kE1, delta, kEuclid));
      EXPECT_EQ(cluster_cone_points(c, tq, delta, quad, ConeSearch::accelerated),
                cluster_cone_points(c, tq, delta, quad));
    }
    nonempty += c.size() > 5;
  }
  EXPECT_GT(nonempty, 20u);
}

TEST(ClusterConePoints, MonotoneInDelta) {
  for (const auto& c : sampled_clusters(0.45, 12, 60, 5)) {
    std::vector<std::size_t> prev;
    for (double delta : {0.05, 0.1, 0.2, 0.3}) {
      auto cur = cluster_cone_points(c, kE1, delta, kEuclid);
      std::vector<std::size_t> a = prev, b = cur;
      std::sort(a.begin(), a.end());
      std::sort(b.begin(), b.end());
      EXPECT_TRUE(std::includes(b.begin(), b.end(), a.begin(), a.end()));
      prev = cur;
    }
  }
}

TEST(Decompose, LineSplitsIntoUnitPieces) {
  const Cluster c = line(6);
  const auto res = decompose(c, kE1, 0.1, kEuclid);
  ASSERT_TRUE(std::holds_alternative<IrreducibleDecomposition>(res));
  const auto& d = std::get<IrreducibleDecomposition>(res);
  EXPECT_EQ(d.count(), 6u);
  EXPECT_EQ(d.backward.vertices, std::vector<std::size_t>{*c.find({0, 0})});
  EXPECT_TRUE(d.backward.edges.empty());
  EXPECT_EQ(d.forward.vertices, std::vector<std::size_t>{*c.find({6, 0})});
  for (const auto& p : d.pieces) {
    EXPECT_EQ(p.vertices.size(), 2u);
    EXPECT_EQ(p.edges.size(), 1u);
  }
  const auto [vs, es] = reassemble(d);
  EXPECT_EQ(vs.size(), c.size());
  EXPECT_EQ(es.size(), c.edges().size());
  const auto walk = effective_walk(c, d);
  ASSERT_EQ(walk.steps.size(), 6u);
  for (const auto& v : walk.steps) EXPECT_EQ(v, (Site{1, 0}));
}

TEST(Decompose, TwoLobes) {
  std::vector<Site> s{{0, 0}, {1, 0}, {0, 1}, {1, 1}, {2, 0}, {3, 0}, {4, 0}, {5, 0}, {4, 1}, {5, 1}};
  const Cluster c = lattice_cluster(s, {0, 0}, {5, 0});
  const auto res = decompose(c, kE1, 0.3, kEuclid);
  ASSERT_TRUE(std::holds_alternative<IrreducibleDecomposition>(res));
  const auto& d = std::get<IrreducibleDecomposition>(res);
  ASSERT_EQ(d.count(), 1u);
  EXPECT_EQ(d.backward.vertices.size(), 5u);
  EXPECT_EQ(d.backward.edges.size(), 5u);
  EXPECT_EQ(d.forward.vertices.size(), 5u);
  const auto walk = effective_walk(c, d);
  EXPECT_EQ(walk.steps, std::vector<Site>{Site({1, 0})});
  Site sum = walk.start - c.origin();
  for (const auto& v : walk.steps) sum = sum + v;
  sum = sum + (c.target() - walk.end);
  EXPECT_EQ(sum, c.target() - c.origin());
}

TEST(Decompose, UndecomposableCounts) {
  const Cluster square = lattice_cluster({{0, 0}, {1, 0}, {0, 1}, {1, 1}}, {0, 0}, {1, 0});
  const auto res = decompose(square, kE1, 0.1, kEuclid);
  ASSERT_TRUE(std::holds_alternative<Undecomposable>(res));
  EXPECT_EQ(std::get<Undecomposable>(res).cone_points, 0u);
}

TEST(Decompose, SampledClustersReassemble) {
  std::size_t decomposed = 0;
  for (const auto& c : sampled_clusters(0.4, 14, 200, 21)) {
    const auto res = decompose(c, kE1, 0.1, kEuclid, ConeSearch::accelerated);
    if (!std::holds_alternative<IrreducibleDecomposition>(res)) continue;
    const auto& d = std::get<IrreducibleDecomposition>(res);
    ++decomposed;
    const auto [vs, es] = reassemble(d);
    EXPECT_EQ(vs.size(), c.size());
    EXPECT_EQ(es.size(), c.edges().size());
    const auto walk = effective_walk(c, d);
    for (const auto& v : walk.steps) EXPECT_TRUE(in_forward_cone(Vec(v), kE1, 0.3, kEuclid));
  }
  EXPECT_GT(decomposed, 10u);
}

TEST(Hausdorff, LineAndBump) {
  const Cluster l = line(5);
  EXPECT_NEAR(polyline_and_hausdorff(l, {}).distance, 0.0, 1e-12);
  const Cluster bump = lattice_cluster({{0, 0}, {1, 0}, {2, 0}, {3, 0}, {4, 0}, {2, 1}, {2, 2}, {2, 3}}, {0, 0}, {4, 0});
  const auto h = polyline_and_hausdorff(bump, {});
  EXPECT_NEAR(h.distance, 3.0, 1e-12);
  EXPECT_EQ(h.polyline.size(), 2u);
}
