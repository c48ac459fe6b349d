#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gen/evaluation.hpp"
#include "gen/evolution.hpp"
#include "gen/graph.hpp"
#include "gen/unit_model.hpp"

namespace gen {

enum class Task { kGraphEmbed, kTabularClassify };

// How the final generation is turned into output: concatenate every model
// (embeddings) / average every model (classification), or keep only the model
// with the lowest validation loss. kAuto picks concat for graphs and best for
// classification.
enum class EnsembleMode { kAuto, kConcat, kBest };

struct RunConfig {
  Task task = Task::kGraphEmbed;
  std::string input;  // edge list or CSV; empty generates an SBM
  std::string output = "out";
  std::uint64_t seed = 7;

  SamplerConfig sampler;
  std::size_t pool_size = 200;
  // 0 follows batch_size.
  std::size_t validation_size = 0;
  AutoencoderSpec autoencoder{10, {8}, 16};
  std::vector<std::size_t> mlp_hidden_dims{16};
  TrainConfig train;
  EvolutionConfig evolution;
  EvalConfig eval;
  EnsembleMode ensemble = EnsembleMode::kAuto;

  std::vector<std::size_t> sbm_blocks{100, 100};
  double sbm_p_in = 0.3;
  double sbm_p_out = 0.02;

  // Pushes the master seed and shared sizes into the sub-configs.
  void resolve();
  void validate() const;
  EnsembleMode effective_ensemble() const;
};

// Paper presets. PS1 is the default setting; PS2 enlarges the sub-networks,
// pool, batches and population.
void apply_preset(RunConfig& config, std::string_view name);

// `key = value` lines with '#' comments; later sources win:
// defaults < preset < file < overrides ("key=value" strings).
RunConfig parse_config(std::string_view file_text, const std::vector<std::string>& overrides = {});

// Re-parsable dump of every key.
std::string format_config(const RunConfig& config);

std::string_view to_string(Task t);
std::string_view to_string(EnsembleMode m);

}  // namespace gen
