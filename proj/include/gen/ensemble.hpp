#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "gen/evolution.hpp"
#include "gen/graph.hpp"
#include "gen/matrix.hpp"
#include "gen/unit_model.hpp"

namespace gen {

// One concatenated vector per node. For m models, p pool graphs and latent
// width d, the slice for (model j, graph t) sits at [(j*p + t)*d, (j*p + t + 1)*d).
class EmbeddingTable {
 public:
  EmbeddingTable() = default;
  EmbeddingTable(std::vector<NodeId> nodes, std::size_t dimension);

  std::size_t dimension() const noexcept { return vectors_.cols(); }
  std::size_t num_nodes() const noexcept { return nodes_.size(); }
  const std::vector<NodeId>& nodes() const noexcept { return nodes_; }

  bool contains(NodeId id) const { return index_.count(id) != 0; }
  // Throws std::out_of_range for unknown ids.
  std::span<const double> row(NodeId id) const;
  std::span<double> row(NodeId id);
  std::span<const double> row_at(std::size_t i) const { return vectors_.row(i); }
  std::span<double> row_at(std::size_t i) { return vectors_.row(i); }

  bool operator==(const EmbeddingTable& other) const {
    return nodes_ == other.nodes_ && vectors_ == other.vectors_;
  }

 private:
  std::vector<NodeId> nodes_;
  std::unordered_map<NodeId, std::size_t> index_;
  Matrix vectors_;
};

// Key of the padding stream for (node, model, graph).
std::uint64_t padding_key(std::uint64_t seed, NodeId node, std::size_t model_index,
                          std::size_t graph_index);

// The node's latent row when it belongs to g, otherwise uniform [0,1)
// padding drawn from the keyed stream.
std::vector<double> model_graph_embedding(const ParamVector& model, const AutoencoderSpec& spec,
                                          const SubNetwork& g, NodeId node, std::uint64_t seed,
                                          std::size_t model_index, std::size_t graph_index);

EmbeddingTable assemble_embeddings(std::span<const ParamVector> models, const AutoencoderSpec& spec,
                                   const Pool& pool, std::span<const NodeId> nodes, std::uint64_t seed);

// Lowest raw loss, ties to the lowest index.
std::size_t select_best_model(const Generation& generation);

}  // namespace gen
