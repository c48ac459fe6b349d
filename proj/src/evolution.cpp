#include "gen/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <thread>

#include "gen/errors.hpp"

namespace gen {
namespace {

// Runs fn(i) for i in [0, n). Each index writes only its own outputs, so the
// result does not depend on the thread count.
template <class Fn>
void parallel_for(std::size_t n, std::size_t threads, Fn&& fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, n);
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(threads);
  {
    std::vector<std::jthread> workers;
    for (std::size_t w = 0; w < threads; ++w) {
      workers.emplace_back([&, w] {
        try {
          for (std::size_t i = w; i < n; i += threads) fn(i);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace

void EvolutionConfig::validate() const {
  if (generations < 1) throw ConfigError("generations must be at least 1");
  if (population < 2) throw ConfigError("population must be at least 2");
  if (!(mutation_probability >= 0.0 && mutation_probability <= 1.0)) {
    throw ConfigError("mutation_probability must lie in [0,1]");
  }
  if (batch_size < 1) throw ConfigError("batch_size must be positive");
  if (validation_size < 1) throw ConfigError("validation_size must be positive");
}

double evaluate_fitness(const ParamVector& model, const AutoencoderSpec& spec,
                        std::span<const SubNetwork> validation) {
  if (validation.empty()) throw ConfigError("validation set must not be empty");
  double total = 0.0;
  for (const auto& g : validation) {
    const auto loss = compute_losses(model, spec, g, 0.0);
    total += loss.reconstruction + loss.proximity;
  }
  return total;
}

double evaluate_fitness(const ParamVector& model, const AutoencoderSpec& spec, const Batch& validation) {
  if (validation.empty()) throw ConfigError("validation set must not be empty");
  double total = 0.0;
  for (const SubNetwork& g : validation) {
    const auto loss = compute_losses(model, spec, g, 0.0);
    total += loss.reconstruction + loss.proximity;
  }
  return total;
}

GraphEmbeddingTask::GraphEmbeddingTask(const Pool& pool, AutoencoderSpec spec)
    : pool_(pool), spec_(std::move(spec)) {
  spec_.validate();
  if (spec_.input_dim != pool_.sub_network_size()) {
    throw ConfigError("autoencoder input_dim must equal the sub-network size");
  }
}

ParamVector GraphEmbeddingTask::initialize(const TrainConfig& config, Rng& rng) const {
  return init_model(spec_, config, rng);
}

ParamVector GraphEmbeddingTask::train(ParamVector model, std::size_t batch_size,
                                      const TrainConfig& config, Rng& rng) const {
  return train_on_batch(std::move(model), spec_, draw_batch(pool_, batch_size, rng), config);
}

std::vector<std::size_t> GraphEmbeddingTask::draw_validation(std::size_t size, Rng& rng) const {
  return draw_batch_indices(pool_.size(), size, rng);
}

UnitTask::Fitness GraphEmbeddingTask::evaluate(const ParamVector& model,
                                               std::span<const std::size_t> validation) const {
  if (validation.empty()) throw ConfigError("validation set must not be empty");
  Fitness f;
  for (auto idx : validation) {
    const auto loss = compute_losses(model, spec_, pool_[idx], 0.0);
    f.raw_loss += loss.reconstruction + loss.proximity;
    f.proximity += loss.proximity;
  }
  return f;
}

ClassificationTask::ClassificationTask(std::vector<LabeledRow> train, std::vector<LabeledRow> validation,
                                       MlpSpec spec)
    : train_(std::move(train)), validation_(std::move(validation)), spec_(std::move(spec)) {
  spec_.validate();
  if (train_.empty() || validation_.empty()) {
    throw ConfigError("classification needs non-empty train and validation splits");
  }
}

ParamVector ClassificationTask::initialize(const TrainConfig& config, Rng& rng) const {
  return init_model(spec_, config, rng);
}

ParamVector ClassificationTask::train(ParamVector model, std::size_t batch_size,
                                      const TrainConfig& config, Rng& rng) const {
  std::vector<LabeledRow> batch;
  for (auto idx : draw_batch_indices(train_.size(), batch_size, rng)) batch.push_back(train_[idx]);
  return mlp_train_on_batch(std::move(model), spec_, batch, config);
}

std::vector<std::size_t> ClassificationTask::draw_validation(std::size_t, Rng&) const {
  std::vector<std::size_t> all(validation_.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  return all;
}

UnitTask::Fitness ClassificationTask::evaluate(const ParamVector& model,
                                               std::span<const std::size_t> validation) const {
  std::vector<LabeledRow> rows;
  rows.reserve(validation.size());
  for (auto idx : validation) rows.push_back(validation_[idx]);
  return Fitness{mlp_loss_and_gradient(model, spec_, rows).loss, 0.0};
}

std::vector<double> normalize_fitness(std::span<const double> raw) {
  if (raw.empty()) throw ConfigError("cannot normalize an empty fitness list");
  for (double v : raw) {
    if (!std::isfinite(v)) throw NumericError("non-finite fitness value");
  }
  const auto [lo, hi] = std::minmax_element(raw.begin(), raw.end());
  const double range = *hi - *lo;
  std::vector<double> out(raw.size(), 0.0);
  if (range > 0.0) {
    for (std::size_t i = 0; i < raw.size(); ++i) {
      out[i] = std::clamp((raw[i] - *lo) / range, 0.0, 1.0);
    }
  }
  return out;
}

std::vector<double> selection_probabilities(std::span<const double> normalized) {
  std::vector<double> p(normalized.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) sum += (p[i] = std::exp(-normalized[i]));
  for (auto& v : p) v /= sum;
  return p;
}

std::vector<ParentPair> select_parent_pairs(std::span<const double> probabilities, Rng& rng) {
  std::vector<double> cumulative(probabilities.size());
  std::partial_sum(probabilities.begin(), probabilities.end(), cumulative.begin());
  const double total = cumulative.back();
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < probabilities.size(); ++i) {
    if (probabilities[i] > 0.0) last_positive = i;
  }
  auto draw = [&] {
    const double u = uniform01(rng) * total;
    auto idx = static_cast<std::size_t>(
        std::upper_bound(cumulative.begin(), cumulative.end(), u) - cumulative.begin());
    return std::min(idx, last_positive);
  };
  std::vector<ParentPair> pairs(probabilities.size());
  for (auto& pair : pairs) {
    pair.first = draw();
    pair.second = draw();
  }
  return pairs;
}

ParamVector crossover(const ParamVector& parent_a, const ParamVector& parent_b, double p_a,
                      double p_b, Rng& rng) {
  if (!(parent_a.layout == parent_b.layout) || parent_a.size() != parent_b.size()) {
    throw ShapeError("crossover parents have different layouts");
  }
  if (!(p_a >= 0.0 && p_b >= 0.0 && p_a + p_b > 0.0)) {
    throw ConfigError("crossover needs non-negative weights with a positive sum");
  }
  const double win_a = p_a / (p_a + p_b);
  ParamVector child = parent_a;
  for (std::size_t t = 0; t < child.size(); ++t) {
    if (!(uniform01(rng) < win_a)) child.values[t] = parent_b.values[t];
  }
  return child;
}

ParamVector mutate(ParamVector theta, double p_hat, Rng& rng) {
  if (!(p_hat >= 0.0 && p_hat <= 1.0)) throw ConfigError("mutation probability must lie in [0,1]");
  for (auto& v : theta.values) {
    if (uniform01(rng) < p_hat) v = uniform01(rng);
  }
  return theta;
}

Generation initial_generation(const UnitTask& task, const TrainConfig& train_config,
                              const EvolutionConfig& config) {
  config.validate();
  Generation g;
  g.index = 1;
  g.models.reserve(config.population);
  for (std::size_t i = 0; i < config.population; ++i) {
    Rng rng = make_stream(config.seed, Stream::kInit, {i});
    g.models.push_back(task.initialize(train_config, rng));
  }
  return g;
}

std::pair<Generation, HistoryRecord> train_and_evaluate(const Generation& current, const UnitTask& task,
                                                        const TrainConfig& train_config,
                                                        const EvolutionConfig& config,
                                                        const Generation* previous) {
  const std::size_t m = current.models.size();
  if (m < 2) throw ConfigError("a generation needs at least 2 models");
  const std::uint64_t j = current.index;

  Generation evaluated;
  evaluated.index = current.index;
  evaluated.models.resize(m);
  parallel_for(m, config.threads, [&](std::size_t i) {
    Rng rng = make_stream(config.seed, Stream::kTrain, {j, i});
    try {
      evaluated.models[i] = task.train(current.models[i], config.batch_size, train_config, rng);
    } catch (const NumericError& e) {
      throw NumericError("generation " + std::to_string(j) + ", model " + std::to_string(i) + ": " +
                         e.what());
    }
  });

  Rng validation_rng = make_stream(config.seed, Stream::kValidation, {j});
  const auto validation = task.draw_validation(config.validation_size, validation_rng);

  std::vector<UnitTask::Fitness> scores(m);
  parallel_for(m, config.threads,
               [&](std::size_t i) { scores[i] = task.evaluate(evaluated.models[i], validation); });

  double previous_proximity = 0.0;
  if (previous != nullptr) {
    std::vector<double> prev(previous->models.size());
    parallel_for(prev.size(), config.threads, [&](std::size_t i) {
      prev[i] = task.evaluate(previous->models[i], validation).proximity;
    });
    previous_proximity = std::accumulate(prev.begin(), prev.end(), 0.0);
  }

  std::vector<double> raw(m);
  for (std::size_t i = 0; i < m; ++i) raw[i] = scores[i].raw_loss;
  for (double v : raw) {
    if (!std::isfinite(v)) {
      throw NumericError("generation " + std::to_string(j) + ": non-finite fitness");
    }
  }
  const auto normalized = normalize_fitness(raw);
  const auto probabilities = selection_probabilities(normalized);
  std::vector<FitnessRecord> fitness(m);
  for (std::size_t i = 0; i < m; ++i) fitness[i] = {raw[i], normalized[i], probabilities[i]};
  evaluated.fitness = std::move(fitness);

  HistoryRecord record;
  record.generation = current.index;
  record.best_loss = *std::min_element(raw.begin(), raw.end());
  record.mean_loss = std::accumulate(raw.begin(), raw.end(), 0.0) / static_cast<double>(m);
  for (const auto& s : scores) record.proximity += s.proximity;
  record.delta_proximity = previous != nullptr ? record.proximity - previous_proximity : 0.0;
  record.best_so_far = record.best_loss;
  return {std::move(evaluated), record};
}

Generation breed(const Generation& evaluated, const EvolutionConfig& config) {
  if (!evaluated.fitness) throw ConfigError("cannot breed a generation without fitness");
  const std::uint64_t j = evaluated.index;
  const auto& fitness = *evaluated.fitness;
  std::vector<double> probabilities(fitness.size());
  for (std::size_t i = 0; i < fitness.size(); ++i) probabilities[i] = fitness[i].selection_probability;

  Rng selection_rng = make_stream(config.seed, Stream::kSelection, {j});
  const auto pairs = select_parent_pairs(probabilities, selection_rng);

  Generation next;
  next.index = evaluated.index + 1;
  next.models.reserve(pairs.size());
  for (std::size_t c = 0; c < pairs.size(); ++c) {
    const auto [a, b] = pairs[c];
    Rng crossover_rng = make_stream(config.seed, Stream::kCrossover, {j, c});
    Rng mutation_rng = make_stream(config.seed, Stream::kMutation, {j, c});
    auto child = crossover(evaluated.models[a], evaluated.models[b], probabilities[a],
                           probabilities[b], crossover_rng);
    next.models.push_back(mutate(std::move(child), config.mutation_probability, mutation_rng));
  }
  return next;
}

GenerationStep evolve_one_generation(const Generation& current, const UnitTask& task,
                                     const TrainConfig& train_config, const EvolutionConfig& config,
                                     const Generation* previous) {
  auto [evaluated, record] = train_and_evaluate(current, task, train_config, config, previous);
  Generation next = breed(evaluated, config);
  return {std::move(evaluated), std::move(next), record};
}

RunResult run(const UnitTask& task, const TrainConfig& train_config, const EvolutionConfig& config) {
  config.validate();
  train_config.validate();
  RunResult result;
  Generation current = initial_generation(task, train_config, config);
  std::optional<Generation> previous;
  double best_so_far = std::numeric_limits<double>::infinity();

  for (std::size_t j = 1; j <= config.generations; ++j) {
    auto [evaluated, record] =
        train_and_evaluate(current, task, train_config, config, previous ? &*previous : nullptr);
    best_so_far = std::min(best_so_far, record.best_loss);
    record.best_so_far = best_so_far;
    result.history.push_back(record);
    if (j == config.generations) {
      result.final_generation = std::move(evaluated);
      break;
    }
    current = breed(evaluated, config);
    previous = std::move(evaluated);
  }
  return result;
}

}  // namespace gen
