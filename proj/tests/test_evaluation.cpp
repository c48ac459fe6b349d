#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "gen/errors.hpp"
#include "gen/evaluation.hpp"

using namespace gen;

namespace {

double brute_auc(const std::vector<double>& s, const std::vector<std::uint8_t>& y) {
  double wins = 0, pairs = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    for (std::size_t k = 0; k < s.size(); ++k) {
      if (!y[i] || y[k]) continue;
      pairs += 1;
      wins += s[i] > s[k] ? 1.0 : s[i] == s[k] ? 0.5 : 0.0;
    }
  }
  return wins / pairs;
}

}  // namespace

TEST(Auc, MatchesPairCountingWithTies) {
  Rng rng(3);
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t n = 2 + uniform_index(rng, 199);
    std::vector<double> s(n);
    std::vector<std::uint8_t> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = static_cast<double>(uniform_index(rng, 12));  // forces ties
      y[i] = uniform01(rng) < 0.4;
    }
    y[0] = 1;
    y[1] = 0;
    EXPECT_EQ(auc(s, y), brute_auc(s, y));
  }
}

TEST(Auc, EdgeCases) {
  const std::vector<double> s{0.1, 0.9};
  EXPECT_EQ(auc(s, std::vector<std::uint8_t>{0, 1}), 1.0);
  EXPECT_EQ(auc(s, std::vector<std::uint8_t>{1, 0}), 0.0);
  EXPECT_THROW(auc(s, std::vector<std::uint8_t>{1, 1}), ShapeError);
  EXPECT_THROW(auc(s, std::vector<std::uint8_t>{1}), ShapeError);
}

TEST(PrecisionAtK, StableSortOracle) {
  Rng rng(8);
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t n = 1 + uniform_index(rng, 200);
    std::vector<double> s(n);
    std::vector<std::uint8_t> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = static_cast<double>(uniform_index(rng, 20));
      y[i] = uniform01(rng) < 0.5;
    }
    const std::size_t k = 1 + uniform_index(rng, n);
    std::vector<std::pair<double, std::size_t>> ranked;
    for (std::size_t i = 0; i < n; ++i) ranked.emplace_back(-s[i], i);
    std::sort(ranked.begin(), ranked.end());  // ties by index
    std::size_t hits = 0;
    for (std::size_t t = 0; t < k; ++t) hits += y[ranked[t].second];
    EXPECT_EQ(precision_at_k(s, y, k), static_cast<double>(hits) / static_cast<double>(k));
  }
}

TEST(PrecisionAtK, RejectsBadK) {
  const std::vector<double> s{1, 2};
  const std::vector<std::uint8_t> y{1, 0};
  EXPECT_THROW(precision_at_k(s, y, 0), ShapeError);
  EXPECT_THROW(precision_at_k(s, y, 3), ShapeError);
}

TEST(DefaultK, Bounds) {
  EXPECT_EQ(default_k(5), 1u);
  EXPECT_EQ(default_k(1000), 100u);
  EXPECT_EQ(default_k(100000), 500u);
}

TEST(Accuracy, Basic) {
  const std::vector<int> a{1, 2, 3, 4}, b{1, 0, 3, 0};
  EXPECT_EQ(accuracy<int>(a, b), 0.5);
  EXPECT_THROW(accuracy<int>(a, std::vector<int>{1}), ShapeError);
}

TEST(LinkSampling, PositivesAndDistinctNegatives) {
  const Graph g = generate_sbm({30, 30}, 0.3, 0.02, 4);
  for (std::size_t np : {1u, 3u}) {
    Rng rng(1);
    const auto samples = sample_link_instances(g, np, rng);
    std::size_t pos = 0;
    std::set<std::pair<NodeId, NodeId>> negatives;
    for (const auto& s : samples) {
      if (s.positive) {
        ++pos;
        EXPECT_TRUE(g.has_edge(s.u, s.v));
      } else {
        EXPECT_FALSE(g.has_edge(s.u, s.v));
        EXPECT_NE(s.u, s.v);
        negatives.insert({std::min(s.u, s.v), std::max(s.u, s.v)});
      }
    }
    EXPECT_EQ(pos, g.num_edges());
    EXPECT_EQ(negatives.size(), np * g.num_edges());
  }
}

TEST(LinkSampling, InfeasibleRatioReportsMaximum) {
  const Graph g = generate_sbm({10, 10}, 0.9, 0.5, 1);
  Rng rng(0);
  try {
    sample_link_instances(g, 50, rng);
    FAIL() << "expected SamplingError";
  } catch (const SamplingError& e) {
    EXPECT_NE(std::string(e.what()).find("maximum feasible np_ratio"), std::string::npos);
  }
}

TEST(Scorers, CosineDotEuclidean) {
  EmbeddingTable t({1, 2, 3}, 2);
  t.row(1)[0] = 1;
  t.row(2)[0] = 2;
  t.row(2)[1] = 2;
  EXPECT_NEAR(score_link(t, 1, 2, Scorer::kCosine), 1 / std::sqrt(2.0), 1e-12);
  EXPECT_EQ(score_link(t, 1, 2, Scorer::kDot), 2.0);
  EXPECT_NEAR(score_link(t, 1, 2, Scorer::kNegEuclidean), -std::sqrt(5.0), 1e-12);
  EXPECT_EQ(score_link(t, 1, 3, Scorer::kCosine), 0.0);  // zero vector
}

TEST(EvaluateLinks, RandomEmbeddingsNearChance) {
  const Graph g = generate_sbm({100, 100}, 0.3, 0.02, 7);
  EmbeddingTable t(g.node_ids(), 32);
  Rng rng(5);
  for (std::size_t i = 0; i < t.num_nodes(); ++i) {
    for (double& v : t.row_at(i)) v = uniform01(rng);
  }
  Rng links(2);
  const auto samples = sample_link_instances(g, 1, links);
  const auto m = evaluate_links(t, samples, EvalConfig{});
  EXPECT_NEAR(m.auc, 0.5, 0.05);
  EXPECT_EQ(m.k, 500u);
}
