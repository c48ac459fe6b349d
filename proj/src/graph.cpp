#include "gen/graph.hpp"

#include <algorithm>
#include <charconv>
#include <deque>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <unordered_set>

#include "gen/errors.hpp"

namespace gen {

Graph::Graph(std::vector<NodeId> node_ids, const std::vector<Edge>& edges) {
  std::sort(node_ids.begin(), node_ids.end());
  node_ids.erase(std::unique(node_ids.begin(), node_ids.end()), node_ids.end());
  if (!node_ids.empty() && node_ids.front() < 0) {
    throw ConfigError("node ids must be non-negative");
  }
  node_ids_ = std::move(node_ids);
  index_.reserve(node_ids_.size());
  for (std::size_t i = 0; i < node_ids_.size(); ++i) index_.emplace(node_ids_[i], i);

  adjacency_.assign(node_ids_.size(), {});
  edges_.reserve(edges.size());
  for (auto [u, v] : edges) {
    if (u == v) throw ConfigError("self-loop on node " + std::to_string(u));
    auto iu = index_of(u);
    auto iv = index_of(v);
    if (!iu || !iv) {
      throw ConfigError("edge (" + std::to_string(u) + "," + std::to_string(v) +
                        ") references an unknown node");
    }
    edges_.emplace_back(std::min(u, v), std::max(u, v));
    adjacency_[*iu].push_back(*iv);
    adjacency_[*iv].push_back(*iu);
  }
  std::sort(edges_.begin(), edges_.end());
  edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());
  for (auto& nbrs : adjacency_) {
    std::sort(nbrs.begin(), nbrs.end());
    nbrs.erase(std::unique(nbrs.begin(), nbrs.end()), nbrs.end());
  }
}

std::optional<std::size_t> Graph::index_of(NodeId id) const {
  auto it = index_.find(id);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

bool Graph::has_edge_between(std::size_t i, std::size_t k) const {
  const auto& nbrs = adjacency_[i];
  return std::binary_search(nbrs.begin(), nbrs.end(), k);
}

bool Graph::has_edge(NodeId u, NodeId v) const {
  auto iu = index_of(u);
  auto iv = index_of(v);
  return iu && iv && has_edge_between(*iu, *iv);
}

Graph load_edge_list(std::string_view text) {
  std::vector<Edge> edges;
  std::set<NodeId> nodes;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;

    std::size_t first = line.find_first_not_of(" \t\r");
    if (first == std::string_view::npos || line[first] == '#') {
      if (end == text.size()) break;
      continue;
    }

    std::vector<std::string_view> tokens;
    std::size_t t = first;
    while (t < line.size()) {
      std::size_t stop = line.find_first_of(" \t\r", t);
      if (stop == std::string_view::npos) stop = line.size();
      tokens.push_back(line.substr(t, stop - t));
      t = line.find_first_not_of(" \t\r", stop);
      if (t == std::string_view::npos) break;
    }
    if (tokens.size() != 2) {
      throw ParseError(line_no, "expected 2 node ids, found " + std::to_string(tokens.size()));
    }
    NodeId ends[2];
    for (int k = 0; k < 2; ++k) {
      auto tok = tokens[k];
      auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), ends[k]);
      if (ec != std::errc() || ptr != tok.data() + tok.size() || ends[k] < 0) {
        throw ParseError(line_no, "invalid node id '" + std::string(tok) + "'");
      }
    }
    if (ends[0] == ends[1]) {
      throw ParseError(line_no, "self-loop on node " + std::to_string(ends[0]));
    }
    nodes.insert(ends[0]);
    nodes.insert(ends[1]);
    edges.emplace_back(ends[0], ends[1]);
    if (end == text.size()) break;
  }
  return Graph(std::vector<NodeId>(nodes.begin(), nodes.end()), edges);
}

Graph load_edge_list_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open edge list '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return load_edge_list(buffer.str());
}

Graph generate_sbm(const std::vector<std::size_t>& block_sizes, double p_in, double p_out,
                   std::uint64_t seed) {
  if (block_sizes.empty()) throw ConfigError("sbm: at least one block required");
  for (auto b : block_sizes) {
    if (b == 0) throw ConfigError("sbm: block sizes must be positive");
  }
  if (!(p_out >= 0.0 && p_out < p_in && p_in <= 1.0)) {
    throw ConfigError("sbm: require 0 <= p_out < p_in <= 1");
  }
  std::vector<std::size_t> block_of;
  for (std::size_t b = 0; b < block_sizes.size(); ++b) {
    block_of.insert(block_of.end(), block_sizes[b], b);
  }
  const std::size_t n = block_of.size();
  std::vector<NodeId> nodes(n);
  std::iota(nodes.begin(), nodes.end(), NodeId{0});

  Rng rng = make_stream(seed, Stream::kGraph);
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = i + 1; k < n; ++k) {
      const double p = block_of[i] == block_of[k] ? p_in : p_out;
      if (uniform01(rng) < p) edges.emplace_back(NodeId(i), NodeId(k));
    }
  }
  return Graph(std::move(nodes), edges);
}

std::optional<std::size_t> SubNetwork::local_index(NodeId id) const {
  for (std::size_t i = 0; i < local_to_global.size(); ++i) {
    if (local_to_global[i] == id) return i;
  }
  return std::nullopt;
}

SubNetwork induced_subnetwork(const Graph& graph, std::span<const std::size_t> node_indices) {
  SubNetwork g;
  const std::size_t n = node_indices.size();
  g.local_to_global.reserve(n);
  for (auto idx : node_indices) g.local_to_global.push_back(graph.id_at(idx));
  g.adjacency = Matrix(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = i + 1; k < n; ++k) {
      if (graph.has_edge_between(node_indices[i], node_indices[k])) {
        g.adjacency(i, k) = 1.0;
        g.adjacency(k, i) = 1.0;
      }
    }
  }
  return g;
}

std::string_view to_string(SamplingStrategy s) {
  switch (s) {
    case SamplingStrategy::kUniformNode:
      return "uniform-node";
    case SamplingStrategy::kBfs:
      return "bfs";
    case SamplingStrategy::kDfs:
      return "dfs";
  }
  return "?";
}

std::optional<SamplingStrategy> parse_sampling_strategy(std::string_view name) {
  if (name == "uniform-node") return SamplingStrategy::kUniformNode;
  if (name == "bfs") return SamplingStrategy::kBfs;
  if (name == "dfs") return SamplingStrategy::kDfs;
  return std::nullopt;
}

namespace {

std::size_t pick_unvisited(const std::vector<char>& visited, std::size_t remaining, Rng& rng) {
  std::size_t target = uniform_index(rng, remaining);
  for (std::size_t i = 0; i < visited.size(); ++i) {
    if (!visited[i] && target-- == 0) return i;
  }
  throw SamplingError("no unvisited node left");
}

void shuffle(std::vector<std::size_t>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::swap(v[i - 1], v[uniform_index(rng, i)]);
  }
}

}  // namespace

std::vector<std::size_t> traverse(const Graph& graph, std::size_t start, std::size_t count,
                                  SamplingStrategy strategy, Rng& rng) {
  const std::size_t n = graph.num_nodes();
  if (count > n) {
    throw SamplingError("cannot collect " + std::to_string(count) + " nodes from a graph of " +
                        std::to_string(n));
  }
  std::vector<char> visited(n, 0);
  std::vector<std::size_t> order;
  order.reserve(count);
  // BFS uses the deque as a queue, DFS as a stack. A node is collected when
  // it leaves the frontier (DFS) or enters it (BFS).
  std::deque<std::size_t> frontier;
  std::vector<std::size_t> nbrs;

  auto seed_walk = [&](std::size_t s) {
    if (strategy == SamplingStrategy::kBfs) {
      visited[s] = 1;
      order.push_back(s);
    }
    frontier.push_back(s);
  };
  seed_walk(start);

  while (order.size() < count) {
    if (frontier.empty()) {
      seed_walk(pick_unvisited(visited, n - order.size(), rng));
      continue;
    }
    std::size_t u;
    if (strategy == SamplingStrategy::kBfs) {
      u = frontier.front();
      frontier.pop_front();
    } else {
      u = frontier.back();
      frontier.pop_back();
      if (visited[u]) continue;
      visited[u] = 1;
      order.push_back(u);
      if (order.size() == count) break;
    }
    auto span = graph.neighbors(u);
    nbrs.assign(span.begin(), span.end());
    shuffle(nbrs, rng);
    for (auto v : nbrs) {
      if (visited[v]) continue;
      if (strategy == SamplingStrategy::kBfs) {
        visited[v] = 1;
        order.push_back(v);
        if (order.size() == count) break;
      }
      frontier.push_back(v);
    }
  }
  return order;
}

SubNetwork sample_subnetwork(const Graph& graph, const SamplerConfig& config, Rng& rng) {
  const std::size_t n = graph.num_nodes();
  const std::size_t want = config.sub_network_size;
  if (want == 0) throw SamplingError("sub-network size must be positive");
  if (want > n) {
    throw SamplingError("sub-network size " + std::to_string(want) + " exceeds node count " +
                        std::to_string(n));
  }
  std::vector<std::size_t> chosen;
  if (config.strategy == SamplingStrategy::kUniformNode) {
    // Partial Fisher-Yates.
    std::vector<std::size_t> all(n);
    std::iota(all.begin(), all.end(), std::size_t{0});
    for (std::size_t i = 0; i < want; ++i) {
      std::swap(all[i], all[i + uniform_index(rng, n - i)]);
    }
    chosen.assign(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(want));
  } else {
    chosen = traverse(graph, uniform_index(rng, n), want, config.strategy, rng);
  }
  return induced_subnetwork(graph, chosen);
}

Pool::Pool(std::vector<SubNetwork> members) : members_(std::move(members)) {
  if (members_.empty()) throw SamplingError("pool must contain at least one sub-network");
  const std::size_t width = members_.front().size();
  for (const auto& g : members_) {
    if (g.size() != width) throw SamplingError("pool members must share one sub-network size");
  }
}

std::size_t Pool::footprint_bytes() const noexcept {
  std::size_t total = 0;
  for (const auto& g : members_) total += g.footprint_bytes();
  return total;
}

double Pool::coverage(const Graph& graph) const {
  if (graph.num_nodes() == 0) return 1.0;
  std::unordered_set<NodeId> seen;
  for (const auto& g : members_) seen.insert(g.local_to_global.begin(), g.local_to_global.end());
  std::size_t covered = 0;
  for (auto id : graph.node_ids()) covered += seen.count(id);
  return static_cast<double>(covered) / static_cast<double>(graph.num_nodes());
}

Pool build_pool(const Graph& graph, std::size_t pool_size, const SamplerConfig& config) {
  Rng rng = make_stream(config.seed, Stream::kSampling);
  return build_pool(graph, pool_size, config, rng);
}

Pool build_pool(const Graph& graph, std::size_t pool_size, const SamplerConfig& config, Rng& rng) {
  if (pool_size == 0) throw SamplingError("pool size must be positive");
  std::vector<SubNetwork> members;
  members.reserve(pool_size);
  for (std::size_t i = 0; i < pool_size; ++i) members.push_back(sample_subnetwork(graph, config, rng));
  return Pool(std::move(members));
}

std::vector<std::size_t> draw_batch_indices(std::size_t population, std::size_t batch_size,
                                            Rng& rng) {
  if (population == 0) throw SamplingError("cannot draw a batch from an empty pool");
  if (batch_size == 0) throw SamplingError("batch size must be positive");
  std::vector<std::size_t> out(batch_size);
  for (auto& idx : out) idx = uniform_index(rng, population);
  return out;
}

Batch draw_batch(const Pool& pool, std::size_t batch_size, Rng& rng) {
  Batch batch;
  for (auto idx : draw_batch_indices(pool.size(), batch_size, rng)) batch.push_back(std::cref(pool[idx]));
  return batch;
}

}  // namespace gen
