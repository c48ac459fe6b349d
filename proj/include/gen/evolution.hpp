#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "gen/graph.hpp"
#include "gen/rng.hpp"
#include "gen/unit_model.hpp"

namespace gen {

struct FitnessRecord {
  double raw_loss = 0.0;
  double normalized_loss = 0.0;
  double selection_probability = 0.0;
};

struct Generation {
  std::size_t index = 1;
  std::vector<ParamVector> models;
  std::optional<std::vector<FitnessRecord>> fitness;
};

struct EvolutionConfig {
  std::size_t generations = 20;
  std::size_t population = 10;
  double mutation_probability = 0.01;
  std::size_t batch_size = 10;
  std::size_t validation_size = 10;
  std::uint64_t seed = 0;
  // Worker threads for per-model training and fitness; 0 = hardware.
  std::size_t threads = 1;

  void validate() const;
};

struct HistoryRecord {
  std::size_t generation = 0;
  double best_loss = 0.0;
  double mean_loss = 0.0;
  // Summed proximity loss of the whole population on this generation's
  // validation draw, and its change against the previous generation measured
  // on that same draw (0 for the first generation).
  double proximity = 0.0;
  double delta_proximity = 0.0;
  double best_so_far = 0.0;
};

using RunHistory = std::vector<HistoryRecord>;

// What a population is trained on. Implementations own the data and know how
// to draw training batches and validation sets from it.
class UnitTask {
 public:
  virtual ~UnitTask() = default;

  virtual ParamLayout layout() const = 0;
  virtual ParamVector initialize(const TrainConfig& config, Rng& rng) const = 0;
  // Draws a training batch with `rng` and returns the trained model.
  virtual ParamVector train(ParamVector model, std::size_t batch_size, const TrainConfig& config,
                            Rng& rng) const = 0;
  virtual std::vector<std::size_t> draw_validation(std::size_t size, Rng& rng) const = 0;

  struct Fitness {
    double raw_loss = 0.0;
    double proximity = 0.0;
  };
  virtual Fitness evaluate(const ParamVector& model, std::span<const std::size_t> validation) const = 0;
};

// Sum over the validation graphs of reconstruction + proximity loss, without
// regularization.
double evaluate_fitness(const ParamVector& model, const AutoencoderSpec& spec,
                        std::span<const SubNetwork> validation);
double evaluate_fitness(const ParamVector& model, const AutoencoderSpec& spec, const Batch& validation);

// Graph embedding: autoencoders over a sub-network pool.
class GraphEmbeddingTask final : public UnitTask {
 public:
  GraphEmbeddingTask(const Pool& pool, AutoencoderSpec spec);

  ParamLayout layout() const override { return make_layout(spec_); }
  ParamVector initialize(const TrainConfig& config, Rng& rng) const override;
  ParamVector train(ParamVector model, std::size_t batch_size, const TrainConfig& config,
                    Rng& rng) const override;
  std::vector<std::size_t> draw_validation(std::size_t size, Rng& rng) const override;
  Fitness evaluate(const ParamVector& model, std::span<const std::size_t> validation) const override;

  const AutoencoderSpec& spec() const noexcept { return spec_; }
  const Pool& pool() const noexcept { return pool_; }

 private:
  const Pool& pool_;
  AutoencoderSpec spec_;
};

// Tabular classification: MLPs trained on rows of a training split; fitness
// is mean cross-entropy over a fixed validation split.
class ClassificationTask final : public UnitTask {
 public:
  ClassificationTask(std::vector<LabeledRow> train, std::vector<LabeledRow> validation, MlpSpec spec);

  ParamLayout layout() const override { return make_layout(spec_); }
  ParamVector initialize(const TrainConfig& config, Rng& rng) const override;
  ParamVector train(ParamVector model, std::size_t batch_size, const TrainConfig& config,
                    Rng& rng) const override;
  // The whole validation split; `size` and `rng` are ignored.
  std::vector<std::size_t> draw_validation(std::size_t size, Rng& rng) const override;
  Fitness evaluate(const ParamVector& model, std::span<const std::size_t> validation) const override;

  const MlpSpec& spec() const noexcept { return spec_; }

 private:
  std::vector<LabeledRow> train_;
  std::vector<LabeledRow> validation_;
  MlpSpec spec_;
};

// Min-max to [0,1]; a constant list maps to all zeros.
std::vector<double> normalize_fitness(std::span<const double> raw);

// Softmax of the negated normalized losses.
std::vector<double> selection_probabilities(std::span<const double> normalized);

using ParentPair = std::pair<std::size_t, std::size_t>;

// probabilities.size() pairs, each index an independent categorical draw.
std::vector<ParentPair> select_parent_pairs(std::span<const double> probabilities, Rng& rng);

// Each entry comes from parent_a with probability p_a / (p_a + p_b).
ParamVector crossover(const ParamVector& parent_a, const ParamVector& parent_b, double p_a,
                      double p_b, Rng& rng);

// Each entry replaced by a fresh uniform [0,1) value with probability p_hat.
ParamVector mutate(ParamVector theta, double p_hat, Rng& rng);

struct GenerationStep {
  Generation evaluated;  // the input generation after training, with fitness
  Generation next;       // children, untrained
  HistoryRecord record;
};

// Trains every model of `current` on its own batch, draws the shared
// validation set and scores the population. `previous` (the last evaluated
// generation) is re-scored on the same draw to produce delta_proximity.
std::pair<Generation, HistoryRecord> train_and_evaluate(const Generation& current, const UnitTask& task,
                                                        const TrainConfig& train_config,
                                                        const EvolutionConfig& config,
                                                        const Generation* previous = nullptr);

// Breeds the next generation from an evaluated one: selection, crossover,
// mutation.
Generation breed(const Generation& evaluated, const EvolutionConfig& config);

GenerationStep evolve_one_generation(const Generation& current, const UnitTask& task,
                                     const TrainConfig& train_config, const EvolutionConfig& config,
                                     const Generation* previous = nullptr);

Generation initial_generation(const UnitTask& task, const TrainConfig& train_config,
                              const EvolutionConfig& config);

struct RunResult {
  Generation final_generation;  // trained and evaluated
  RunHistory history;
};

RunResult run(const UnitTask& task, const TrainConfig& train_config, const EvolutionConfig& config);

}  // namespace gen
