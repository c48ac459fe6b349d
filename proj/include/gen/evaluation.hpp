#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "gen/ensemble.hpp"
#include "gen/errors.hpp"
#include "gen/graph.hpp"
#include "gen/rng.hpp"

namespace gen {

struct LinkSample {
  NodeId u = 0;
  NodeId v = 0;
  bool positive = false;
};

enum class Scorer { kCosine, kDot, kNegEuclidean };

std::string_view to_string(Scorer s);
std::optional<Scorer> parse_scorer(std::string_view name);

struct EvalConfig {
  std::size_t np_ratio = 1;
  // 0 picks min(500, samples / 10).
  std::size_t k = 0;
  Scorer scorer = Scorer::kCosine;
  std::uint64_t seed = 0;

  void validate() const;
};

struct Metrics {
  double auc = 0.0;
  double precision_at_k = 0.0;
  std::size_t k = 0;
  std::optional<double> accuracy;
  double wall_seconds = 0.0;
};

// Every edge as a positive plus np_ratio * |E| distinct non-edges drawn
// uniformly without replacement.
std::vector<LinkSample> sample_link_instances(const Graph& graph, std::size_t np_ratio, Rng& rng);

double score_link(const EmbeddingTable& table, NodeId u, NodeId v, Scorer scorer);

// Labels are 1 for positive, 0 for negative.

// Mann-Whitney AUC; tied scores count one half.
double auc(std::span<const double> scores, std::span<const std::uint8_t> labels);

// Positive fraction among the k best scores. Ties keep input order.
double precision_at_k(std::span<const double> scores, std::span<const std::uint8_t> labels, std::size_t k);

template <class T>
double accuracy(std::span<const T> predicted, std::span<const T> truth) {
  if (predicted.size() != truth.size()) throw ShapeError("accuracy: length mismatch");
  if (predicted.empty()) throw ShapeError("accuracy: empty input");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i) hits += predicted[i] == truth[i];
  return static_cast<double>(hits) / static_cast<double>(predicted.size());
}

std::size_t default_k(std::size_t samples);

// Scores every sample with `scorer` and reports AUC and Precision@K.
Metrics evaluate_links(const EmbeddingTable& table, std::span<const LinkSample> samples,
                       const EvalConfig& config);

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

// Wall time of fn() in seconds.
template <class Fn>
double timed(Fn&& fn) {
  Stopwatch watch;
  fn();
  return watch.seconds();
}

}  // namespace gen
