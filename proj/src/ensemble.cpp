#include "gen/ensemble.hpp"

#include <stdexcept>
#include <string>

#include "gen/errors.hpp"

namespace gen {

EmbeddingTable::EmbeddingTable(std::vector<NodeId> nodes, std::size_t dimension)
    : nodes_(std::move(nodes)), vectors_(nodes_.size(), dimension) {
  index_.reserve(nodes_.size());
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (!index_.emplace(nodes_[i], i).second) {
      throw ConfigError("duplicate node " + std::to_string(nodes_[i]) + " in embedding table");
    }
  }
}

std::span<const double> EmbeddingTable::row(NodeId id) const {
  auto it = index_.find(id);
  if (it == index_.end()) throw std::out_of_range("node " + std::to_string(id) + " has no embedding");
  return vectors_.row(it->second);
}

std::span<double> EmbeddingTable::row(NodeId id) {
  auto it = index_.find(id);
  if (it == index_.end()) throw std::out_of_range("node " + std::to_string(id) + " has no embedding");
  return vectors_.row(it->second);
}

std::uint64_t padding_key(std::uint64_t seed, NodeId node, std::size_t model_index,
                          std::size_t graph_index) {
  return mix_key(seed, Stream::kPadding,
                 {static_cast<std::uint64_t>(node), model_index, graph_index});
}

namespace {

void fill_padding(std::span<double> out, std::uint64_t key) {
  for (std::size_t c = 0; c < out.size(); ++c) out[c] = keyed_uniform01(key, c);
}

}  // namespace

std::vector<double> model_graph_embedding(const ParamVector& model, const AutoencoderSpec& spec,
                                          const SubNetwork& g, NodeId node, std::uint64_t seed,
                                          std::size_t model_index, std::size_t graph_index) {
  std::vector<double> out(spec.latent_dim);
  if (auto local = g.local_index(node)) {
    const auto pass = forward(model, spec, g.adjacency);
    auto z = pass.latent(spec).row(*local);
    out.assign(z.begin(), z.end());
  } else {
    fill_padding(out, padding_key(seed, node, model_index, graph_index));
  }
  return out;
}

EmbeddingTable assemble_embeddings(std::span<const ParamVector> models, const AutoencoderSpec& spec,
                                   const Pool& pool, std::span<const NodeId> nodes, std::uint64_t seed) {
  if (models.empty()) throw ConfigError("cannot assemble embeddings from an empty population");
  const std::size_t m = models.size();
  const std::size_t p = pool.size();
  const std::size_t d = spec.latent_dim;
  EmbeddingTable table(std::vector<NodeId>(nodes.begin(), nodes.end()), m * p * d);

  std::vector<char> present(table.num_nodes());
  std::unordered_map<NodeId, std::size_t> row_of;
  for (std::size_t i = 0; i < table.num_nodes(); ++i) row_of.emplace(table.nodes()[i], i);

  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t t = 0; t < p; ++t) {
      const SubNetwork& g = pool[t];
      const std::size_t offset = (j * p + t) * d;
      std::fill(present.begin(), present.end(), 0);
      const auto pass = forward(models[j], spec, g.adjacency);
      const Matrix& z = pass.latent(spec);
      for (std::size_t local = 0; local < g.size(); ++local) {
        auto it = row_of.find(g.local_to_global[local]);
        if (it == row_of.end()) continue;
        present[it->second] = 1;
        auto dst = table.row_at(it->second).subspan(offset, d);
        auto src = z.row(local);
        std::copy(src.begin(), src.end(), dst.begin());
      }
      for (std::size_t i = 0; i < table.num_nodes(); ++i) {
        if (present[i]) continue;
        fill_padding(table.row_at(i).subspan(offset, d), padding_key(seed, table.nodes()[i], j, t));
      }
    }
  }
  return table;
}

std::size_t select_best_model(const Generation& generation) {
  if (!generation.fitness || generation.fitness->empty()) {
    throw ConfigError("generation has no fitness records");
  }
  const auto& f = *generation.fitness;
  std::size_t best = 0;
  for (std::size_t i = 1; i < f.size(); ++i) {
    if (f[i].raw_loss < f[best].raw_loss) best = i;
  }
  return best;
}

}  // namespace gen
