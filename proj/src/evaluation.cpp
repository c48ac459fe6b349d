#include "gen/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <unordered_set>

namespace gen {

std::string_view to_string(Scorer s) {
  switch (s) {
    case Scorer::kCosine:
      return "cosine";
    case Scorer::kDot:
      return "dot";
    case Scorer::kNegEuclidean:
      return "neg-euclidean";
  }
  return "?";
}

std::optional<Scorer> parse_scorer(std::string_view name) {
  if (name == "cosine") return Scorer::kCosine;
  if (name == "dot") return Scorer::kDot;
  if (name == "neg-euclidean") return Scorer::kNegEuclidean;
  return std::nullopt;
}

void EvalConfig::validate() const {
  if (np_ratio < 1) throw ConfigError("np_ratio must be at least 1");
}

std::vector<LinkSample> sample_link_instances(const Graph& graph, std::size_t np_ratio, Rng& rng) {
  if (np_ratio < 1) throw ConfigError("np_ratio must be at least 1");
  const std::uint64_t n = graph.num_nodes();
  const std::uint64_t pairs = n * (n - (n > 0 ? 1 : 0)) / 2;
  const std::uint64_t edges = graph.num_edges();
  const std::uint64_t non_edges = pairs - edges;
  const std::uint64_t wanted = np_ratio * edges;
  if (wanted > non_edges) {
    throw SamplingError("np_ratio " + std::to_string(np_ratio) + " needs " + std::to_string(wanted) +
                        " non-edges but only " + std::to_string(non_edges) +
                        " exist; maximum feasible np_ratio is " +
                        std::to_string(edges == 0 ? 0 : non_edges / edges));
  }

  std::vector<LinkSample> out;
  out.reserve(edges + wanted);
  for (auto [u, v] : graph.edges()) out.push_back({u, v, true});

  if (wanted * 2 > non_edges) {
    // Dense regime: enumerate, then a partial shuffle.
    std::vector<std::pair<std::size_t, std::size_t>> candidates;
    candidates.reserve(non_edges);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t k = i + 1; k < n; ++k) {
        if (!graph.has_edge_between(i, k)) candidates.emplace_back(i, k);
      }
    }
    for (std::size_t s = 0; s < wanted; ++s) {
      std::swap(candidates[s], candidates[s + uniform_index(rng, candidates.size() - s)]);
      out.push_back({graph.id_at(candidates[s].first), graph.id_at(candidates[s].second), false});
    }
  } else {
    std::unordered_set<std::uint64_t> taken;
    while (out.size() < edges + wanted) {
      std::uint64_t i = uniform_index(rng, n);
      std::uint64_t k = uniform_index(rng, n);
      if (i == k) continue;
      if (i > k) std::swap(i, k);
      if (graph.has_edge_between(i, k) || !taken.insert(i * n + k).second) continue;
      out.push_back({graph.id_at(i), graph.id_at(k), false});
    }
  }
  return out;
}

double score_link(const EmbeddingTable& table, NodeId u, NodeId v, Scorer scorer) {
  auto a = table.row(u);
  auto b = table.row(v);
  switch (scorer) {
    case Scorer::kDot:
      return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
    case Scorer::kNegEuclidean: {
      double s = 0.0;
      for (std::size_t c = 0; c < a.size(); ++c) s += (a[c] - b[c]) * (a[c] - b[c]);
      return -std::sqrt(s);
    }
    case Scorer::kCosine: {
      const double dot = std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
      const double na = std::sqrt(std::inner_product(a.begin(), a.end(), a.begin(), 0.0));
      const double nb = std::sqrt(std::inner_product(b.begin(), b.end(), b.begin(), 0.0));
      if (na == 0.0 || nb == 0.0) return 0.0;
      return dot / (na * nb);
    }
  }
  return 0.0;
}

double auc(std::span<const double> scores, std::span<const std::uint8_t> labels) {
  if (scores.size() != labels.size()) throw ShapeError("auc: scores and labels differ in length");
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  double positive_rank_sum = 0.0;
  std::size_t positives = 0;
  for (std::size_t lo = 0; lo < n;) {
    std::size_t hi = lo;
    while (hi < n && scores[order[hi]] == scores[order[lo]]) ++hi;
    // Ranks lo+1 .. hi share their average.
    const double rank = 0.5 * static_cast<double>(lo + 1 + hi);
    for (std::size_t t = lo; t < hi; ++t) {
      if (labels[order[t]]) {
        positive_rank_sum += rank;
        ++positives;
      }
    }
    lo = hi;
  }
  const std::size_t negatives = n - positives;
  if (positives == 0 || negatives == 0) throw ShapeError("auc needs both positive and negative samples");
  const double p = static_cast<double>(positives);
  return (positive_rank_sum - p * (p + 1.0) / 2.0) / (p * static_cast<double>(negatives));
}

double precision_at_k(std::span<const double> scores, std::span<const std::uint8_t> labels, std::size_t k) {
  if (scores.size() != labels.size()) {
    throw ShapeError("precision_at_k: scores and labels differ in length");
  }
  if (k == 0 || k > scores.size()) {
    throw ShapeError("precision_at_k: k=" + std::to_string(k) + " outside [1, " +
                     std::to_string(scores.size()) + "]");
  }
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  std::size_t hits = 0;
  for (std::size_t t = 0; t < k; ++t) hits += labels[order[t]] != 0;
  return static_cast<double>(hits) / static_cast<double>(k);
}

std::size_t default_k(std::size_t samples) {
  return std::max<std::size_t>(1, std::min<std::size_t>(500, samples / 10));
}

Metrics evaluate_links(const EmbeddingTable& table, std::span<const LinkSample> samples,
                       const EvalConfig& config) {
  std::vector<double> scores;
  std::vector<std::uint8_t> labels;
  scores.reserve(samples.size());
  labels.reserve(samples.size());
  for (const auto& s : samples) {
    scores.push_back(score_link(table, s.u, s.v, config.scorer));
    labels.push_back(s.positive ? 1 : 0);
  }
  Metrics m;
  m.k = config.k != 0 ? config.k : default_k(samples.size());
  m.auc = auc(scores, labels);
  m.precision_at_k = precision_at_k(scores, labels, m.k);
  return m;
}

}  // namespace gen
