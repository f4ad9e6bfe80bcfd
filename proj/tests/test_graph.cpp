#include "fixtures.hpp"
#include "ragkit/graph.hpp"
#include "ragkit/synth.hpp"

#include <gtest/gtest.h>

#include <limits>

using namespace ragkit;
using fixture::vec;

TEST(Validate, MinimalGraph) {
  const auto g = fixture::graph("g", {vec({0.0})});
  EXPECT_TRUE(validate(g, 1, 1));
}

TEST(Validate, DanglingEdge) {
  auto g = fixture::graph("g", {vec({0.0}), vec({1.0})});
  g.edges.push_back({0, 5, vec({1.0})});
  const auto v = validate(g, 1, 1);
  EXPECT_FALSE(v);
  EXPECT_NE(v.reason.find("dangling"), std::string::npos);
}

TEST(Validate, DimensionMismatch) {
  const auto g = fixture::graph("g", {vec({1.0, 2.0})});
  const auto v = validate(g, 1, 1);
  EXPECT_FALSE(v);
  EXPECT_NE(v.reason.find("dimension"), std::string::npos);
}

TEST(Validate, RejectsSelfLoopsDuplicatesAndNonFinite) {
  auto loop = fixture::graph("g", {vec({0.0}), vec({1.0})}, {{0, 0, 1.0}});
  EXPECT_NE(validate(loop, 1, 1).reason.find("self-loop"), std::string::npos);
  auto dup = fixture::graph("g", {vec({0.0}), vec({1.0})}, {{0, 1, 1.0}, {1, 0, 2.0}});
  EXPECT_NE(validate(dup, 1, 1).reason.find("duplicate edge"), std::string::npos);
  auto nan = fixture::graph("g", {vec({std::numeric_limits<double>::quiet_NaN()})});
  EXPECT_NE(validate(nan, 1, 1).reason.find("non-finite"), std::string::npos);
  auto ids = fixture::graph("g", {vec({0.0}), vec({1.0})});
  ids.node_ids[1] = "n0";
  EXPECT_NE(validate(ids, 1, 1).reason.find("duplicate node id"), std::string::npos);
  auto edim = fixture::graph("g", {vec({0.0}), vec({1.0})}, {{0, 1, 1.0}});
  EXPECT_FALSE(validate(edim, 1, 2));
}

TEST(CanonicalOrder, SortsNodesAndRemapsEdges) {
  AttributedGraph g;
  g.id = "g";
  g.node_ids = {"b", "a"};
  g.node_attrs = {vec({2.0}), vec({1.0})};
  g.edges.push_back({0, 1, vec({5.0})});
  const auto c = canonical_order(g);
  EXPECT_EQ(c.node_ids, (std::vector<std::string>{"a", "b"}));
  EXPECT_EQ(c.node_attrs[0](0), 1.0);
  EXPECT_EQ(c.node_attrs[1](0), 2.0);
  ASSERT_EQ(c.edges.size(), 1u);
  EXPECT_EQ(c.edges[0].u, 0);
  EXPECT_EQ(c.edges[0].v, 1);
  EXPECT_EQ(c.edges[0].attr(0), 5.0);
}

TEST(CanonicalOrder, NormalizesEdgeEndpoints) {
  auto g = fixture::graph("g", {vec({0.0}), vec({1.0}), vec({2.0}), vec({3.0})}, {{3, 1, 1.0}});
  const auto c = canonical_order(g);
  EXPECT_EQ(c.edges[0].u, 1);
  EXPECT_EQ(c.edges[0].v, 3);
}

TEST(CanonicalOrder, SortedGraphUnchanged) {
  const auto g = fixture::graph("g", {vec({0.0}), vec({1.0})}, {{0, 1, 1.0}});
  EXPECT_EQ(canonical_order(g), g);
}

TEST(CanonicalOrder, IdempotentOnRandomGraphs) {
  DistortionSpec spec;
  spec.level = 0.2;
  for (std::uint64_t s = 0; s < 50; ++s) {
    RandomStream rng(s, 0, 0, 0);
    auto g = generate_base(spec, 0, rng);
    std::shuffle(g.edges.begin(), g.edges.end(), rng.engine());
    for (auto& e : g.edges) std::swap(e.u, e.v);
    const auto once = canonical_order(g);
    EXPECT_EQ(canonical_order(once), once);
    EXPECT_TRUE(validate(once, spec.node_dim, spec.edge_dim));
  }
}

TEST(GraphStructure, EdgeLookupIsSymmetric) {
  const GraphStructure s(3, {{0, 2}});
  EXPECT_EQ(s.edge_between(0, 2), 0);
  EXPECT_EQ(s.edge_between(2, 0), 0);
  EXPECT_EQ(s.edge_between(0, 1), kUnmatched);
}

TEST(Dataset, LabelsMustBeDeclared) {
  GraphDataset ds;
  ds.categories = {"a", "b"};
  ds.graphs.push_back(fixture::graph("g", {vec({0.0})}, {}, "c"));
  EXPECT_FALSE(validate(ds));
  ds.graphs[0].label = "b";
  EXPECT_TRUE(validate(ds));
  EXPECT_EQ(ds.category_index("b"), 1);
  EXPECT_EQ(ds.category_index("z"), kUnmatched);
  EXPECT_EQ(ds.slice("b").size(), 1u);
}
