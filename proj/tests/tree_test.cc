#include "dynkin/tree.h"

#include <gtest/gtest.h>

#include <random>

#include "oracles.h"

namespace dynkin {
namespace {

using testing::AsSet;

// Binary depth-2 tree: 0 -> {1, 2}, 1 -> {3, 4}, 2 -> {5, 6}.
ScenarioTree Binary2() { return ScenarioTree::Uniform(2, 2); }

TEST(ScenarioTreeTest, UniformShape) {
  const ScenarioTree tree = Binary2();
  EXPECT_EQ(tree.size(), 7u);
  EXPECT_EQ(tree.horizon(), 2);
  EXPECT_EQ(std::vector<NodeId>(tree.leaves().begin(), tree.leaves().end()),
            (std::vector<NodeId>{3, 4, 5, 6}));
  EXPECT_EQ(tree.depth(5), 2);
  EXPECT_EQ(*tree.parent(5), 2);
  EXPECT_FALSE(tree.parent(0).has_value());
  EXPECT_EQ(tree.ancestor_at(6, 1), 2);
}

TEST(ScenarioTreeTest, NodeProb) {
  EXPECT_DOUBLE_EQ(Binary2().node_prob(0), 1.0);
  EXPECT_DOUBLE_EQ(Binary2().node_prob(4), 0.25);
  const ScenarioTree chain = ScenarioTree::Uniform(3, 1);
  for (NodeId v = 0; v < 4; ++v) EXPECT_EQ(chain.node_prob(v), 1.0);
}

TEST(ScenarioTreeTest, RejectsZeroHorizon) {
  EXPECT_THROW(ScenarioTree({{0, std::nullopt, 1.0}}, 0), TreeError);
}

TEST(ScenarioTreeTest, RejectsBadProbabilitySumNamingParent) {
  try {
    ScenarioTree({{0, std::nullopt, 1.0}, {1, 0, 0.5}, {2, 0, 0.4}}, 1);
    FAIL() << "expected TreeError";
  } catch (const TreeError& e) {
    EXPECT_EQ(e.node(), 0);
    EXPECT_NE(std::string(e.what()).find("node 0"), std::string::npos);
  }
}

TEST(ScenarioTreeTest, RejectsUnevenHorizon) {
  // Node 2 is a leaf at depth 1 while the horizon is 2.
  try {
    ScenarioTree({{0, std::nullopt, 1.0}, {1, 0, 0.5}, {2, 0, 0.5}, {3, 1, 1.0}},
                 2);
    FAIL() << "expected TreeError";
  } catch (const TreeError& e) {
    EXPECT_EQ(e.node(), 2);
  }
}

TEST(ScenarioTreeTest, RejectsStructuralErrors) {
  // Second root.
  EXPECT_THROW(ScenarioTree({{0, std::nullopt, 1.0}, {1, std::nullopt, 1.0}}, 1),
               TreeError);
  // Parent after child.
  EXPECT_THROW(ScenarioTree({{0, std::nullopt, 1.0}, {1, 2, 1.0}, {2, 0, 1.0}}, 2),
               TreeError);
  // Zero probability branch.
  EXPECT_THROW(ScenarioTree({{0, std::nullopt, 1.0}, {1, 0, 1.0}, {2, 0, 0.0}}, 1),
               TreeError);
  // Ids out of order.
  EXPECT_THROW(ScenarioTree({{0, std::nullopt, 1.0}, {2, 0, 1.0}}, 1), TreeError);
  // Root probability other than one.
  EXPECT_THROW(ScenarioTree({{0, std::nullopt, 0.5}, {1, 0, 1.0}}, 1), TreeError);
}

TEST(StoppingTimeTest, CanonicalizeExamples) {
  const ScenarioTree tree = Binary2();
  const NodeId root[] = {0};
  EXPECT_EQ(AsSet(Canonicalize(root, tree)), (std::set<NodeId>{0}));
  EXPECT_EQ(AsSet(Canonicalize({}, tree)), (std::set<NodeId>{3, 4, 5, 6}));
  const NodeId root_and_leaf[] = {0, 4};
  EXPECT_EQ(AsSet(Canonicalize(root_and_leaf, tree)), (std::set<NodeId>{0}));
  // Uncovered leaves are materialized.
  const NodeId left[] = {1};
  EXPECT_EQ(AsSet(Canonicalize(left, tree)), (std::set<NodeId>{1, 5, 6}));
}

TEST(StoppingTimeTest, CanonicalizeRejectsUnknownNode) {
  const NodeId bad[] = {7};
  EXPECT_THROW(Canonicalize(bad, Binary2()), TreeError);
}

TEST(StoppingTimeTest, StopDepth) {
  const ScenarioTree tree = Binary2();
  for (NodeId leaf : tree.leaves()) {
    EXPECT_EQ(StopDepth(StoppingTime::Root(tree), leaf), 0);
    EXPECT_EQ(StopDepth(StoppingTime::Horizon(tree), leaf), 2);
  }
  const NodeId mixed[] = {1, 5, 6};
  const StoppingTime tau = Canonicalize(mixed, tree);
  EXPECT_EQ(tau.StopDepth(3), 1);
  EXPECT_EQ(tau.StopDepth(4), 1);
  EXPECT_EQ(tau.StopDepth(5), 2);
  EXPECT_EQ(tau.StopDepth(6), 2);
  EXPECT_THROW(tau.StopDepth(1), TreeError);
}

TEST(StoppingTimeTest, MinStopExamples) {
  const ScenarioTree tree = Binary2();
  const NodeId left[] = {1};
  const NodeId right[] = {2};
  const StoppingTime sigma = Canonicalize(left, tree);
  const StoppingTime tau = Canonicalize(right, tree);
  EXPECT_EQ(MinStop(tau, tau), tau);
  EXPECT_EQ(MinStop(StoppingTime::Root(tree), tau), StoppingTime::Root(tree));
  const StoppingTime both = MinStop(sigma, tau);
  EXPECT_EQ(AsSet(both), (std::set<NodeId>{1, 2}));
  for (NodeId leaf : tree.leaves()) EXPECT_EQ(both.StopDepth(leaf), 1);
}

TEST(StoppingTimeTest, MinStopRejectsForeignTree) {
  EXPECT_THROW(MinStop(StoppingTime::Root(Binary2()),
                       StoppingTime::Root(ScenarioTree::Uniform(2, 3))),
               ShapeError);
  EXPECT_THROW(Leq(StoppingTime::Root(Binary2()),
                   StoppingTime::Root(ScenarioTree::Uniform(3, 2))),
               ShapeError);
}

TEST(StoppingTimeTest, LeqExamples) {
  const ScenarioTree tree = Binary2();
  const NodeId early[] = {1, 2};
  const NodeId mixed[] = {1};
  const StoppingTime sigma = Canonicalize(early, tree);
  const StoppingTime tau = Canonicalize(mixed, tree);
  EXPECT_TRUE(Leq(StoppingTime::Root(tree), tau));
  EXPECT_TRUE(Leq(tau, tau));
  EXPECT_TRUE(Leq(sigma, tau));
  EXPECT_FALSE(Leq(tau, sigma));
}

TEST(StoppingTimeTest, ExpectAtExamples) {
  const ScenarioTree tree = Binary2();
  const AdaptedProcess constant(tree.size(), 3.5);
  std::mt19937_64 rng(7);
  for (int k = 0; k < 10; ++k) {
    EXPECT_NEAR(ExpectAt(tree, constant, testing::RandomStoppingTime(rng, tree)),
                3.5, 1e-15);
  }
  const AdaptedProcess z(testing::RandomValues(rng, tree.size()));
  EXPECT_EQ(ExpectAt(tree, z, StoppingTime::Root(tree)), z[0]);

  const ScenarioTree one = ScenarioTree::Uniform(1, 2);
  EXPECT_DOUBLE_EQ(
      ExpectAt(one, AdaptedProcess({0.3, 1.0, 0.0}), StoppingTime::Horizon(one)),
      0.5);
  EXPECT_THROW(ExpectAt(one, AdaptedProcess({1.0}), StoppingTime::Horizon(one)),
               ShapeError);
}

TEST(StoppingTimeTest, EnumerationCounts) {
  EXPECT_EQ(CountStoppingTimes(ScenarioTree::Uniform(1, 1)), 2u);
  EXPECT_EQ(CountStoppingTimes(ScenarioTree::Uniform(2, 2)), 5u);
  EXPECT_EQ(CountStoppingTimes(ScenarioTree::Uniform(3, 2)), 26u);
  EXPECT_EQ(CountStoppingTimes(ScenarioTree::Uniform(4, 2)), 677u);
  EXPECT_EQ(CountStoppingTimes(ScenarioTree::Uniform(5, 2)), 458330u);
  EXPECT_EQ(EnumerateStoppingTimes(ScenarioTree::Uniform(2, 2)).size(), 5u);
}

TEST(StoppingTimeTest, EnumerationCapRefusalNamesCount) {
  try {
    EnumerateStoppingTimes(ScenarioTree::Uniform(5, 2));
    FAIL() << "expected EnumerationCapError";
  } catch (const EnumerationCapError& e) {
    EXPECT_EQ(e.count(), 458330u);
    EXPECT_NE(std::string(e.what()).find("458330"), std::string::npos);
  }
  EXPECT_EQ(CountStoppingTimes(ScenarioTree::Uniform(8, 2)),
            std::numeric_limits<std::uint64_t>::max());
}

// Properties over random uneven trees.
class TreePropertyTest : public ::testing::TestWithParam<int> {};

TEST_P(TreePropertyTest, CanonicalFormInvariants) {
  std::mt19937_64 rng(GetParam());
  const ScenarioTree tree = testing::RandomTree(rng, 1 + GetParam() % 4, 3);
  for (int k = 0; k < 20; ++k) {
    const auto raw = testing::RandomRawSet(rng, tree);
    const StoppingTime tau = Canonicalize(raw, tree);
    // Idempotent.
    EXPECT_EQ(Canonicalize(tau.stop_set(), tree), tau);
    // Partition of path space.
    double mass = 0.0;
    for (NodeId v : tau.stop_set()) mass += tree.node_prob(v);
    EXPECT_NEAR(mass, 1.0, 1e-12);
    // Same first stop on every path as the raw set.
    const std::set<NodeId> raw_set(raw.begin(), raw.end());
    for (NodeId leaf : tree.leaves()) {
      EXPECT_EQ(*tau.StopNodeAt(leaf),
                testing::FirstStopOnPath(tree, raw_set, leaf));
    }
  }
}

TEST_P(TreePropertyTest, MinStopLattice) {
  std::mt19937_64 rng(100 + GetParam());
  const ScenarioTree tree = testing::RandomTree(rng, 1 + GetParam() % 4, 3);
  for (int k = 0; k < 20; ++k) {
    const StoppingTime a = testing::RandomStoppingTime(rng, tree);
    const StoppingTime b = testing::RandomStoppingTime(rng, tree);
    const StoppingTime c = testing::RandomStoppingTime(rng, tree);
    EXPECT_EQ(MinStop(a, b), MinStop(b, a));
    EXPECT_EQ(MinStop(MinStop(a, b), c), MinStop(a, MinStop(b, c)));
    EXPECT_EQ(MinStop(a, a), a);
    EXPECT_TRUE(Leq(MinStop(a, b), a));
    for (NodeId leaf : tree.leaves()) {
      EXPECT_EQ(MinStop(a, b).StopDepth(leaf),
                std::min(a.StopDepth(leaf), b.StopDepth(leaf)));
    }
  }
}

TEST_P(TreePropertyTest, ExpectAtMonotoneAndMatchesPathSum) {
  std::mt19937_64 rng(200 + GetParam());
  const ScenarioTree tree = testing::RandomTree(rng, 1 + GetParam() % 4, 3);
  const auto z = testing::RandomValues(rng, tree.size());
  auto bumped = z;
  for (double& x : bumped) x += std::uniform_real_distribution<double>(0, 1)(rng);
  for (int k = 0; k < 20; ++k) {
    const StoppingTime tau = testing::RandomStoppingTime(rng, tree);
    const double e = ExpectAt(tree, AdaptedProcess(z), tau);
    EXPECT_LE(e, ExpectAt(tree, AdaptedProcess(bumped), tau));
    EXPECT_NEAR(e, testing::PathExpectation(tree, z, testing::AsSet(tau)), 1e-12);
  }
}

TEST_P(TreePropertyTest, EnumerationMatchesRecursiveOracle) {
  std::mt19937_64 rng(300 + GetParam());
  const ScenarioTree tree = testing::RandomTree(rng, 1 + GetParam() % 3, 3);
  const auto expected = testing::AllStopSets(tree, 0);
  EXPECT_EQ(CountStoppingTimes(tree), testing::CountByRecursion(tree, 0));
  std::set<std::set<NodeId>> seen;
  ForEachStoppingTime(tree, [&](const StoppingTime& t) {
    EXPECT_TRUE(seen.insert(AsSet(t)).second) << "duplicate stopping time";
  });
  EXPECT_EQ(seen, std::set<std::set<NodeId>>(expected.begin(), expected.end()));
}

INSTANTIATE_TEST_SUITE_P(Seeds, TreePropertyTest, ::testing::Range(0, 12));

}  // namespace
}  // namespace dynkin
