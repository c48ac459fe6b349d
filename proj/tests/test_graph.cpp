#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "gen/errors.hpp"
#include "gen/graph.hpp"

using namespace gen;

namespace {

Graph path_graph(std::size_t n) {
  std::vector<NodeId> ids(n);
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < n; ++i) ids[i] = static_cast<NodeId>(i);
  for (std::size_t i = 0; i + 1 < n; ++i) edges.emplace_back(i, i + 1);
  return Graph(ids, edges);
}

}  // namespace

TEST(Graph, DeduplicatesAndCanonicalizesEdges) {
  Graph g({1, 2, 3}, {{2, 1}, {1, 2}, {3, 2}});
  EXPECT_EQ(g.num_nodes(), 3u);
  EXPECT_EQ(g.num_edges(), 2u);
  EXPECT_EQ(g.edges()[0], Edge(1, 2));
  EXPECT_EQ(g.edges()[1], Edge(2, 3));
  EXPECT_TRUE(g.has_edge(2, 1));
  EXPECT_FALSE(g.has_edge(1, 3));
}

TEST(Graph, RejectsSelfLoopsAndUnknownEndpoints) {
  EXPECT_THROW(Graph({1, 2}, {{1, 1}}), ConfigError);
  EXPECT_THROW(Graph({1, 2}, {{1, 5}}), ConfigError);
}

TEST(EdgeList, SkipsCommentsAndBlankLines) {
  Graph g = load_edge_list("# header\n\n10 20\n20 30  \n# done\n");
  EXPECT_EQ(g.num_nodes(), 3u);
  EXPECT_EQ(g.num_edges(), 2u);
}

TEST(EdgeList, ReportsLineNumbers) {
  try {
    load_edge_list("1 2\n3\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
  EXPECT_THROW(load_edge_list("1 x\n"), ParseError);
  EXPECT_THROW(load_edge_list("4 4\n"), ParseError);
}

TEST(Sbm, EdgeCountNearExpectation) {
  // Expected edges: 2 * C(50,2) * 0.3 + 50 * 50 * 0.02 = 785.
  const Graph g = generate_sbm({50, 50}, 0.3, 0.02, 7);
  const double mean = 785.0;
  const double sd = std::sqrt(2 * 1225 * 0.3 * 0.7 + 2500 * 0.02 * 0.98);
  EXPECT_EQ(g.num_nodes(), 100u);
  EXPECT_LT(std::abs(static_cast<double>(g.num_edges()) - mean), 4 * sd);
}

TEST(Sbm, BlockDensitiesMatch) {
  double within = 0, across = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Graph g = generate_sbm({30, 30}, 0.4, 0.05, seed);
    for (auto [u, v] : g.edges()) ((u < 30) == (v < 30) ? within : across) += 1;
  }
  EXPECT_NEAR(within / (20 * 2 * 435.0), 0.4, 0.02);
  EXPECT_NEAR(across / (20 * 900.0), 0.05, 0.01);
}

TEST(Sbm, DeterministicAndValidated) {
  EXPECT_EQ(generate_sbm({20, 20}, 0.3, 0.02, 3).edges(), generate_sbm({20, 20}, 0.3, 0.02, 3).edges());
  EXPECT_THROW(generate_sbm({10}, 0.1, 0.2, 0), ConfigError);
  EXPECT_THROW(generate_sbm({}, 0.3, 0.1, 0), ConfigError);
}

TEST(Traverse, BfsFromEndOfPathIsInOrder) {
  const Graph g = path_graph(8);
  Rng rng(1);
  const auto order = traverse(g, 0, 5, SamplingStrategy::kBfs, rng);
  EXPECT_EQ(order, (std::vector<std::size_t>{0, 1, 2, 3, 4}));
}

TEST(Traverse, DfsCollectsDistinctConnectedNodes) {
  const Graph g = generate_sbm({25, 25}, 0.3, 0.05, 11);
  Rng rng(5);
  for (int rep = 0; rep < 50; ++rep) {
    const auto order = traverse(g, uniform_index(rng, 50), 10, SamplingStrategy::kDfs, rng);
    std::set<std::size_t> distinct(order.begin(), order.end());
    EXPECT_EQ(distinct.size(), 10u);
  }
}

TEST(Traverse, RestartsWhenComponentIsExhausted) {
  // Two disjoint triangles; asking for 5 nodes forces a restart.
  Graph g({0, 1, 2, 3, 4, 5}, {{0, 1}, {1, 2}, {0, 2}, {3, 4}, {4, 5}, {3, 5}});
  for (auto strategy : {SamplingStrategy::kBfs, SamplingStrategy::kDfs}) {
    Rng rng(9);
    const auto order = traverse(g, 0, 5, strategy, rng);
    std::set<std::size_t> distinct(order.begin(), order.end());
    EXPECT_EQ(distinct.size(), 5u);
    EXPECT_EQ(std::set<std::size_t>(order.begin(), order.begin() + 3), (std::set<std::size_t>{0, 1, 2}));
  }
  Rng rng(0);
  EXPECT_THROW(traverse(g, 0, 7, SamplingStrategy::kBfs, rng), SamplingError);
}

TEST(SubNetwork, InducedAdjacencyMatchesGraph) {
  const Graph g = generate_sbm({20, 20}, 0.3, 0.05, 2);
  SamplerConfig cfg;
  Rng rng(3);
  for (auto strategy : {SamplingStrategy::kUniformNode, SamplingStrategy::kBfs, SamplingStrategy::kDfs}) {
    cfg.strategy = strategy;
    const SubNetwork s = sample_subnetwork(g, cfg, rng);
    ASSERT_EQ(s.size(), 10u);
    for (std::size_t i = 0; i < s.size(); ++i) {
      EXPECT_EQ(s.adjacency(i, i), 0.0);
      for (std::size_t k = 0; k < s.size(); ++k) {
        EXPECT_EQ(s.adjacency(i, k), s.adjacency(k, i));
        EXPECT_EQ(s.adjacency(i, k) == 1.0, g.has_edge(s.local_to_global[i], s.local_to_global[k]));
      }
      EXPECT_EQ(s.local_index(s.local_to_global[i]), i);
    }
  }
}

TEST(SubNetwork, TooLargeRequestFails) {
  const Graph g = path_graph(5);
  SamplerConfig cfg;
  cfg.sub_network_size = 6;
  Rng rng(0);
  EXPECT_THROW(sample_subnetwork(g, cfg, rng), SamplingError);
}

TEST(Pool, DeterministicForSeed) {
  const Graph g = generate_sbm({30, 30}, 0.3, 0.02, 1);
  SamplerConfig cfg;
  cfg.seed = 4;
  EXPECT_EQ(build_pool(g, 20, cfg), build_pool(g, 20, cfg));
  SamplerConfig other = cfg;
  other.seed = 5;
  EXPECT_FALSE(build_pool(g, 20, cfg) == build_pool(g, 20, other));
}

TEST(Pool, RejectsEmptyAndMixedSizes) {
  EXPECT_THROW(Pool({}), SamplingError);
  const Graph g = path_graph(6);
  const std::vector<std::size_t> a{0, 1, 2}, b{0, 1};
  EXPECT_THROW(Pool({induced_subnetwork(g, a), induced_subnetwork(g, b)}), SamplingError);
}

TEST(Pool, FootprintIsLinearInPoolSize) {
  const Graph g = generate_sbm({50, 50}, 0.2, 0.02, 1);
  SamplerConfig cfg;
  const Pool small = build_pool(g, 50, cfg);
  const Pool large = build_pool(g, 100, cfg);
  EXPECT_EQ(large.footprint_bytes(), 2 * small.footprint_bytes());
  EXPECT_EQ(small.footprint_bytes(), 50 * (10 * 10 * sizeof(double) + 10 * sizeof(NodeId)));
}

TEST(Pool, CoverageCountsDistinctNodes) {
  const Graph g = path_graph(6);
  const std::vector<std::size_t> a{0, 1, 2}, b{1, 2, 3};
  const Pool pool({induced_subnetwork(g, a), induced_subnetwork(g, b)});
  EXPECT_DOUBLE_EQ(pool.coverage(g), 4.0 / 6.0);
}

TEST(Batch, DrawsWithReplacementUniformly) {
  Rng rng(12);
  std::vector<int> counts(5, 0);
  const auto idx = draw_batch_indices(5, 50000, rng);
  for (auto i : idx) ++counts[i];
  for (int c : counts) EXPECT_NEAR(c / 50000.0, 0.2, 0.01);
  // More draws than members is allowed.
  EXPECT_EQ(draw_batch_indices(2, 10, rng).size(), 10u);
  EXPECT_THROW(draw_batch_indices(0, 1, rng), SamplingError);
}
