#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "hypersteiner/datagen.hpp"
#include "hypersteiner/heuristics.hpp"
#include "hypersteiner/random.hpp"
#include "test_support.hpp"

using namespace hypersteiner;
using hstest::random_point;
using hstest::random_points;

namespace {

void expect_steiner_degree_three(const Tree& tree) {
  const auto deg = tree.degrees();
  for (int i = tree.terminal_count(); i < tree.vertex_count(); ++i) EXPECT_EQ(deg[i], 3) << "vertex " << i;
}

std::vector<KleinPoint> polygon_points(int d, std::uint64_t seed) {
  DatasetSpec spec;
  spec.kind = DatasetKind::polygon_one_per_vertex;
  spec.d = d;
  spec.sigma = 0.1;
  spec.seed = seed;
  return generate(spec);
}

}  // namespace

TEST(TreeHelpers, ContractAndDrop) {
  Tree t;
  t.terminals = {KleinPoint(0.5, 0), KleinPoint(-0.5, 0), KleinPoint(0, 0.5)};
  t.steiner = {KleinPoint(0, 0), KleinPoint(0.01, 0)};
  t.edges = {{0, 4}, {3, 4}, {1, 3}, {2, 3}};
  ASSERT_TRUE(is_spanning_tree(t));
  const Tree c = contract_edge(t, 4, 3);
  EXPECT_EQ(c.steiner.size(), 1u);
  EXPECT_TRUE(is_spanning_tree(c));
  EXPECT_EQ(c.degrees()[3], 3);
  // Order of the endpoints does not matter when only one is a Steiner point.
  EXPECT_EQ(contract_edge(t, 0, 4).steiner.size(), 1u);
  EXPECT_THROW(contract_edge(t, 0, 1), InputError);

  const Tree d = drop_steiner(t, {1, 0});
  EXPECT_EQ(d.steiner.size(), 1u);
  EXPECT_EQ(d.edges, (std::vector<std::pair<int, int>>{{0, 3}}));
}

TEST(TreeHelpers, MstTreeSpansTerminalsAndSteiner) {
  RandomStream rng(61);
  const auto terms = random_points(rng, 12);
  const auto extra = random_points(rng, 5);
  const Tree t = mst_tree(terms, extra);
  EXPECT_TRUE(is_spanning_tree(t));
  EXPECT_EQ(t.vertex_count(), 17);
}

TEST(RedPercent, Examples) {
  EXPECT_DOUBLE_EQ(red_percent(90.0, 100.0), 10.0);
  EXPECT_DOUBLE_EQ(red_percent(100.0, 100.0), 0.0);
  EXPECT_DOUBLE_EQ(red_percent(1.0, 0.0), 0.0);
}

TEST(ReduceDegree, WithoutSteinerPointsGivesTheMst) {
  RandomStream rng(62);
  const auto terms = random_points(rng, 15);
  const Tree t = reduce_degree(terms, {});
  EXPECT_TRUE(t.steiner.empty());
  EXPECT_NEAR(tree_length(t), mst(terms).total_length(), 1e-12);
}

TEST(ReduceDegree, MovesADegreeThreePointToTheFermatPoint) {
  const std::vector<KleinPoint> tri{KleinPoint(0.5, 0.1), KleinPoint(-0.4, 0.4), KleinPoint(-0.1, -0.5)};
  const Tree t = reduce_degree(tri, {barycenter(tri[0], tri[1], tri[2])});
  ASSERT_EQ(t.steiner.size(), 1u);
  const auto f = fermat_point(tri[0], tri[1], tri[2]);
  ASSERT_TRUE(f.has_value());
  EXPECT_LT(distance(t.steiner[0], *f), 1e-9);
  expect_steiner_degree_three(t);
}

TEST(ReduceDegree, DropsLeafAndPathSteinerPoints) {
  const std::vector<KleinPoint> terms{KleinPoint(0.5, 0), KleinPoint(-0.5, 0)};
  // A leaf far away and a point on the segment.
  const Tree t = reduce_degree(terms, {KleinPoint(0, 0.9), KleinPoint(0, 0)});
  EXPECT_TRUE(t.steiner.empty());
  EXPECT_TRUE(is_spanning_tree(t));
}

TEST(ReduceDegree, SplitsADegreeFourPoint) {
  const auto sq = hstest::regular_polygon(4, 0.5, std::numbers::pi / 4);
  const Tree t = reduce_degree(sq, {KleinPoint(0, 0)});
  ASSERT_EQ(t.steiner.size(), 2u);
  expect_steiner_degree_three(t);
  EXPECT_TRUE(is_spanning_tree(t));
  double cross_len = 0.0;
  for (int i = 0; i < 4; ++i) cross_len += distance(sq[i], KleinPoint(0, 0));
  EXPECT_LT(tree_length(t), cross_len);
}

TEST(ReduceDegree, OutputSteinerPointsHaveDegreeThree) {
  RandomStream rng(63);
  for (int trial = 0; trial < 20; ++trial) {
    const auto terms = random_points(rng, 10 + trial, 0.95);
    const auto cands = random_points(rng, 3 + trial % 7, 0.9);
    const Tree t = reduce_degree(terms, cands);
    EXPECT_TRUE(is_spanning_tree(t));
    expect_steiner_degree_three(t);
  }
}

TEST(ExpandAngle, InsertsAFermatPointAtASharpVertex) {
  Tree path;
  path.terminals = {KleinPoint(0.5, 0.0), KleinPoint(0.0, 0.0), KleinPoint(0.0, 0.5)};
  path.edges = {{0, 1}, {1, 2}};
  const Tree t = expand_angle(path);
  ASSERT_EQ(t.steiner.size(), 1u);
  EXPECT_TRUE(is_spanning_tree(t));
  expect_steiner_degree_three(t);
  EXPECT_LT(tree_length(t), tree_length(path));
}

TEST(ExpandAngle, LeavesWideAnglesAlone) {
  Tree path;
  path.terminals = {KleinPoint(0.5, 0.0), KleinPoint(0.0, 0.0), KleinPoint(-0.5, 0.1)};
  path.edges = {{0, 1}, {1, 2}};
  const Tree t = expand_angle(path);
  EXPECT_TRUE(t.steiner.empty());
  EXPECT_EQ(t.edges, path.edges);
}

TEST(HyperSteiner, SmallInputs) {
  EXPECT_THROW(hypersteiner::hypersteiner(std::vector<KleinPoint>{KleinPoint(0, 0)}), InputError);
  const auto two = hypersteiner::hypersteiner({KleinPoint(0.1, 0), KleinPoint(-0.3, 0.2)});
  EXPECT_TRUE(two.tree.steiner.empty());
  EXPECT_EQ(two.red_percent, 0.0);

  const auto tri = hstest::regular_polygon(3, 0.6);
  const auto r = hypersteiner::hypersteiner(tri);
  ASSERT_EQ(r.tree.steiner.size(), 1u);
  EXPECT_LT(std::hypot(r.tree.steiner[0].x(), r.tree.steiner[0].y()), 1e-10);
  EXPECT_GT(r.red_percent, 0.0);

  const std::vector<KleinPoint> line{KleinPoint(-0.5, 0), KleinPoint(0, 0), KleinPoint(0.5, 0)};
  const auto l = hypersteiner::hypersteiner(line);
  EXPECT_TRUE(l.tree.steiner.empty());
  EXPECT_EQ(l.red_percent, 0.0);
}

TEST(HyperSteiner, FourPointPolygonNearTheBoundary) {
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const auto r = hypersteiner::hypersteiner(polygon_points(4, seed));
    EXPECT_NEAR(r.red_percent, 31.34, 0.5) << "seed " << seed;
    EXPECT_EQ(r.tree.steiner.size(), 2u);
  }
}

TEST(HyperSteiner, ProducesValidTreesNoLongerThanTheMst) {
  RandomStream rng(64);
  for (int trial = 0; trial < 20; ++trial) {
    const auto pts = random_points(rng, 5 + 3 * trial, trial % 2 ? 0.999 : 0.9);
    const auto r = hypersteiner::hypersteiner(pts);
    EXPECT_TRUE(is_spanning_tree(r.tree));
    expect_steiner_degree_three(r.tree);
    EXPECT_LE(r.length, r.mst_length * (1 + 1e-12));
    EXPECT_NEAR(r.mst_length, hstest::prim_length(pts), 1e-9 * r.mst_length);
    EXPECT_EQ(r.tree.terminals, pts);
    EXPECT_EQ(r.method, "hs");
  }
}

TEST(HyperSteiner, IsDeterministic) {
  const auto pts = polygon_points(10, 5);
  const auto a = hypersteiner::hypersteiner(pts);
  const auto b = hypersteiner::hypersteiner(pts);
  EXPECT_EQ(a.length, b.length);
  EXPECT_EQ(a.tree.steiner, b.tree.steiner);
  EXPECT_EQ(a.tree.edges, b.tree.edges);
}

TEST(RandomizedHyperSteiner, RejectsBadConfigs) {
  const auto pts = polygon_points(5, 0);
  RhsConfig cfg;
  cfg.insertion_low = 0.7;
  cfg.insertion_high = 0.6;
  EXPECT_THROW(randomized_hypersteiner(pts, cfg), InputError);
  cfg.insertion_low = 0.0;
  EXPECT_THROW(randomized_hypersteiner(pts, cfg), InputError);
  cfg.insertion_low = 0.3;
  cfg.insertion_high = 1.0;
  EXPECT_THROW(randomized_hypersteiner(pts, cfg), InputError);
  EXPECT_THROW(randomized_hypersteiner({KleinPoint(0, 0)}), InputError);
}

TEST(RandomizedHyperSteiner, TwoTerminalsGiveTheSegment) {
  const auto r = randomized_hypersteiner({KleinPoint(0.1, 0), KleinPoint(-0.3, 0.2)});
  EXPECT_TRUE(r.tree.steiner.empty());
  EXPECT_EQ(r.red_percent, 0.0);
}

TEST(RandomizedHyperSteiner, SeedDeterminesTheResult) {
  const auto pts = polygon_points(8, 3);
  RhsConfig cfg;
  cfg.seed = 17;
  const auto a = randomized_hypersteiner(pts, cfg);
  const auto b = randomized_hypersteiner(pts, cfg);
  EXPECT_EQ(a.length, b.length);
  EXPECT_EQ(a.tree.steiner, b.tree.steiner);
  EXPECT_EQ(a.seed, 17u);
}

TEST(RandomizedHyperSteiner, ProducesValidTrees) {
  RandomStream rng(65);
  for (int trial = 0; trial < 8; ++trial) {
    const auto pts = random_points(rng, 6 + 2 * trial, trial % 2 ? 0.999 : 0.9);
    RhsConfig cfg;
    cfg.seed = static_cast<std::uint64_t>(trial);
    const auto r = randomized_hypersteiner(pts, cfg);
    EXPECT_TRUE(is_spanning_tree(r.tree));
    EXPECT_LE(r.length, r.mst_length);
    EXPECT_GE(r.red_percent, 0.0);
    // Any tree is at least half as long as the minimum spanning tree.
    EXPECT_LT(r.red_percent, 50.0);
    EXPECT_EQ(r.tree.terminals, pts);
  }
}

TEST(RandomizedHyperSteiner, MatchesTheKnownFourPointTopology) {
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    RhsConfig cfg;
    cfg.seed = seed;
    const auto pts = polygon_points(4, seed);
    const auto r = randomized_hypersteiner(pts, cfg);
    const auto h = hypersteiner::hypersteiner(pts);
    EXPECT_EQ(r.tree.steiner.size(), 2u);
    EXPECT_NEAR(r.red_percent, h.red_percent, 0.1);
  }
}
