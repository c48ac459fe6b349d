#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "gen/matrix.hpp"
#include "gen/rng.hpp"

namespace gen {

using NodeId = std::int64_t;
using Edge = std::pair<NodeId, NodeId>;

// Simple undirected graph. Node ids are kept sorted; internally every node
// also has a dense index in [0, num_nodes()) which orders the same way.
class Graph {
 public:
  Graph() = default;

  // Throws ConfigError on self-loops, negative ids, or edge endpoints missing
  // from `node_ids`. Duplicate edges (in either orientation) collapse.
  Graph(std::vector<NodeId> node_ids, const std::vector<Edge>& edges);

  std::size_t num_nodes() const noexcept { return node_ids_.size(); }
  std::size_t num_edges() const noexcept { return edges_.size(); }

  const std::vector<NodeId>& node_ids() const noexcept { return node_ids_; }
  // Canonical edges (u < v), sorted.
  const std::vector<Edge>& edges() const noexcept { return edges_; }

  std::optional<std::size_t> index_of(NodeId id) const;
  NodeId id_at(std::size_t index) const { return node_ids_[index]; }

  // Sorted dense neighbor indices of the node at `index`.
  std::span<const std::size_t> neighbors(std::size_t index) const { return adjacency_[index]; }
  std::size_t degree(std::size_t index) const { return adjacency_[index].size(); }

  bool has_edge(NodeId u, NodeId v) const;
  bool has_edge_between(std::size_t i, std::size_t k) const;

 private:
  std::vector<NodeId> node_ids_;
  std::unordered_map<NodeId, std::size_t> index_;
  std::vector<std::vector<std::size_t>> adjacency_;
  std::vector<Edge> edges_;
};

// Parses "u v" lines; '#' lines and blank lines are skipped.
Graph load_edge_list(std::string_view text);
Graph load_edge_list_file(const std::string& path);

// Stochastic block model over node ids 0..n-1, blocks laid out consecutively.
Graph generate_sbm(const std::vector<std::size_t>& block_sizes, double p_in, double p_out,
                   std::uint64_t seed);

// Induced sub-graph on a set of global nodes, with a local 0/1 adjacency.
struct SubNetwork {
  std::vector<NodeId> local_to_global;
  Matrix adjacency;

  std::size_t size() const noexcept { return local_to_global.size(); }
  std::optional<std::size_t> local_index(NodeId id) const;
  std::size_t footprint_bytes() const noexcept {
    return adjacency.size() * sizeof(double) + local_to_global.size() * sizeof(NodeId);
  }
  bool operator==(const SubNetwork&) const = default;
};

SubNetwork induced_subnetwork(const Graph& graph, std::span<const std::size_t> node_indices);

enum class SamplingStrategy { kUniformNode, kBfs, kDfs };

std::string_view to_string(SamplingStrategy s);
std::optional<SamplingStrategy> parse_sampling_strategy(std::string_view name);

struct SamplerConfig {
  SamplingStrategy strategy = SamplingStrategy::kBfs;
  std::size_t sub_network_size = 10;
  std::uint64_t seed = 0;
};

// Collects `count` dense node indices by BFS or DFS from `start`. Neighbors
// are visited in a random order; an exhausted component restarts the walk at
// a uniformly chosen unvisited node.
std::vector<std::size_t> traverse(const Graph& graph, std::size_t start, std::size_t count,
                                  SamplingStrategy strategy, Rng& rng);

SubNetwork sample_subnetwork(const Graph& graph, const SamplerConfig& config, Rng& rng);

class Pool {
 public:
  explicit Pool(std::vector<SubNetwork> members);

  std::size_t size() const noexcept { return members_.size(); }
  std::size_t sub_network_size() const noexcept { return members_.front().size(); }
  const SubNetwork& operator[](std::size_t i) const { return members_[i]; }
  const std::vector<SubNetwork>& members() const noexcept { return members_; }

  std::size_t footprint_bytes() const noexcept;
  // Fraction of `graph`'s nodes appearing in at least one member.
  double coverage(const Graph& graph) const;

  bool operator==(const Pool&) const = default;

 private:
  std::vector<SubNetwork> members_;
};

// `pool_size` independent samples from the sampling stream of config.seed.
Pool build_pool(const Graph& graph, std::size_t pool_size, const SamplerConfig& config);
Pool build_pool(const Graph& graph, std::size_t pool_size, const SamplerConfig& config, Rng& rng);

using Batch = std::vector<std::reference_wrapper<const SubNetwork>>;

// Uniform draws with replacement.
std::vector<std::size_t> draw_batch_indices(std::size_t population, std::size_t batch_size,
                                            Rng& rng);
Batch draw_batch(const Pool& pool, std::size_t batch_size, Rng& rng);

}  // namespace gen
