#include "gen/pipeline.hpp"

#include <cstdio>
#include <filesystem>
#include <functional>
#include <optional>
#include <algorithm>

#include "gen/errors.hpp"
#include "gen/evaluation.hpp"

namespace gen {

namespace {

std::string fixed(double x, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  return buf;
}

std::string num(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", x);
  return buf;
}

// Runs one stage and re-throws its failures tagged with the stage name.
template <class Fn>
auto stage(const std::string& name, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const StageError&) {
    throw;
  } catch (const ConfigError& e) {
    throw StageError(name, e.what(), 1);
  } catch (const std::exception& e) {
    throw StageError(name, e.what(), 2);
  }
}

std::string path_in(const RunConfig& config, const char* file) {
  return (std::filesystem::path(config.output) / file).string();
}

void prepare_output(const RunConfig& config) {
  stage("output", [&] {
    std::filesystem::create_directories(config.output);
    return 0;
  });
}

Graph load_graph(const RunConfig& config) {
  return stage("load", [&] {
    if (config.input.empty()) {
      return generate_sbm(config.sbm_blocks, config.sbm_p_in, config.sbm_p_out, config.seed);
    }
    return load_edge_list_file(config.input);
  });
}

void write_common(const RunConfig& config, RunReport& report) {
  stage("write", [&] {
    const std::string path = path_in(config, kConfigFile);
    write_text_atomic(path, format_config(config));
    report.artifacts.push_back(path);
    return 0;
  });
}

void write_metrics_file(const RunConfig& config, RunReport& report) {
  stage("write", [&] {
    const std::string path = path_in(config, kMetricsFile);
    write_text_atomic(path, format_metrics(report.metrics));
    report.artifacts.push_back(path);
    return 0;
  });
}

void add_link_metrics(MetricsFile& m, const Graph& graph, const EmbeddingTable& table,
                      const EvalConfig& eval, double& seconds) {
  Metrics metrics;
  std::size_t samples = 0;
  seconds = timed([&] {
    Rng rng = make_stream(eval.seed, Stream::kLinks);
    const auto links = sample_link_instances(graph, eval.np_ratio, rng);
    samples = links.size();
    metrics = evaluate_links(table, links, eval);
  });
  m.emplace_back("np_ratio", std::to_string(eval.np_ratio));
  m.emplace_back("positives", std::to_string(graph.num_edges()));
  m.emplace_back("negatives", std::to_string(samples - graph.num_edges()));
  m.emplace_back("scorer", std::string(to_string(eval.scorer)));
  m.emplace_back("k", std::to_string(metrics.k));
  m.emplace_back("auc", num(metrics.auc));
  m.emplace_back("prec_at_k", num(metrics.precision_at_k));
}

RunReport run_graph_embed(const RunConfig& config) {
  RunReport report;
  Stopwatch total;
  const Graph graph = load_graph(config);
  if (graph.num_nodes() < config.sampler.sub_network_size) {
    throw StageError("sampling",
                     "graph has " + std::to_string(graph.num_nodes()) + " nodes, fewer than sub_network_size " +
                         std::to_string(config.sampler.sub_network_size),
                     1);
  }

  std::optional<Pool> pool;
  const double t_sampling = timed([&] {
    pool = stage("sampling", [&] { return build_pool(graph, config.pool_size, config.sampler); });
  });
  const double coverage = pool->coverage(graph);
  if (coverage < 1.0) {
    report.warnings.push_back("pool covers " + fixed(100.0 * coverage, 1) +
                              "% of nodes; uncovered nodes get padding only");
  }

  RunResult result;
  const double t_evolution = timed([&] {
    result = stage("evolution", [&] {
      GraphEmbeddingTask task(*pool, config.autoencoder);
      return run(task, config.train, config.evolution);
    });
  });

  const std::size_t best = select_best_model(result.final_generation);
  EmbeddingTable table;
  const double t_ensemble = timed([&] {
    table = stage("ensemble", [&] {
      const auto& models = result.final_generation.models;
      std::span<const ParamVector> chosen = models;
      if (config.effective_ensemble() == EnsembleMode::kBest) chosen = chosen.subspan(best, 1);
      return assemble_embeddings(chosen, config.autoencoder, *pool, graph.node_ids(), config.seed);
    });
  });

  auto& m = report.metrics;
  m.emplace_back("task", std::string(to_string(config.task)));
  m.emplace_back("nodes", std::to_string(graph.num_nodes()));
  m.emplace_back("edges", std::to_string(graph.num_edges()));
  m.emplace_back("pool_size", std::to_string(pool->size()));
  m.emplace_back("sub_network_size", std::to_string(pool->sub_network_size()));
  m.emplace_back("coverage", num(coverage));
  m.emplace_back("population", std::to_string(config.evolution.population));
  m.emplace_back("generations", std::to_string(config.evolution.generations));
  m.emplace_back("ensemble", std::string(to_string(config.effective_ensemble())));
  m.emplace_back("best_model", std::to_string(best));
  m.emplace_back("best_validation_loss", num((*result.final_generation.fitness)[best].raw_loss));
  m.emplace_back("embedding_dim", std::to_string(table.dimension()));
  double t_evaluation = 0.0;
  stage("evaluation", [&] {
    add_link_metrics(m, graph, table, config.eval, t_evaluation);
    return 0;
  });
  m.emplace_back("wall_seconds_sampling", fixed(t_sampling, 3));
  m.emplace_back("wall_seconds_evolution", fixed(t_evolution, 3));
  m.emplace_back("wall_seconds_ensemble", fixed(t_ensemble, 3));
  m.emplace_back("wall_seconds_evaluation", fixed(t_evaluation, 3));

  stage("write", [&] {
    const std::string emb = path_in(config, kEmbeddingsFile);
    write_embeddings(table, emb);
    report.artifacts.push_back(emb);
    const std::string hist = path_in(config, kHistoryFile);
    write_history(result.history, hist);
    report.artifacts.push_back(hist);
    return 0;
  });
  m.emplace_back("wall_seconds", fixed(total.seconds(), 3));
  write_metrics_file(config, report);
  write_common(config, report);
  return report;
}

RunReport run_tabular(const RunConfig& config) {
  RunReport report;
  Stopwatch total;
  const TabularDataset data = stage("load", [&] { return load_tabular_csv(config.input, config.seed); });
  if (data.num_classes() < 2) throw StageError("load", "tabular data needs at least 2 classes", 1);
  if (data.validation.empty() || data.test.empty()) {
    throw StageError("load", "too few rows for a 70/15/15 split with non-empty validation and test", 1);
  }

  const MlpSpec spec{data.num_columns(), config.mlp_hidden_dims, data.num_classes()};
  RunResult result;
  const double t_evolution = timed([&] {
    result = stage("evolution", [&] {
      ClassificationTask task(data.rows(data.train), data.rows(data.validation), spec);
      return run(task, config.train, config.evolution);
    });
  });

  const auto& models = result.final_generation.models;
  const std::size_t best = select_best_model(result.final_generation);
  const bool concat = config.effective_ensemble() == EnsembleMode::kConcat;
  std::vector<std::size_t> predicted, truth;
  std::string predictions = "row\tlabel\tpredicted\n";
  stage("evaluation", [&] {
    for (std::size_t i : data.test) {
      std::size_t guess = 0;
      if (concat) {
        std::vector<double> mean(spec.num_classes, 0.0);
        for (const auto& model : models) {
          const auto probs = mlp_forward(model, spec, data.features.row(i));
          for (std::size_t c = 0; c < mean.size(); ++c) mean[c] += probs[c];
        }
        guess = static_cast<std::size_t>(std::max_element(mean.begin(), mean.end()) - mean.begin());
      } else {
        guess = mlp_predict(models[best], spec, data.features.row(i));
      }
      predicted.push_back(guess);
      truth.push_back(data.labels[i]);
      predictions += std::to_string(i) + '\t' + data.class_names[data.labels[i]] + '\t' +
                     data.class_names[guess] + '\n';
    }
    return 0;
  });

  auto& m = report.metrics;
  m.emplace_back("task", std::string(to_string(config.task)));
  m.emplace_back("rows", std::to_string(data.labels.size()));
  m.emplace_back("columns", std::to_string(data.num_columns()));
  m.emplace_back("classes", std::to_string(data.num_classes()));
  m.emplace_back("train_rows", std::to_string(data.train.size()));
  m.emplace_back("validation_rows", std::to_string(data.validation.size()));
  m.emplace_back("test_rows", std::to_string(data.test.size()));
  m.emplace_back("preprocessing", "stratified-70-15-15;minmax-fit-on-train");
  m.emplace_back("population", std::to_string(config.evolution.population));
  m.emplace_back("generations", std::to_string(config.evolution.generations));
  m.emplace_back("ensemble", std::string(to_string(config.effective_ensemble())));
  m.emplace_back("best_model", std::to_string(best));
  m.emplace_back("best_validation_loss", num((*result.final_generation.fitness)[best].raw_loss));
  m.emplace_back("accuracy", num(accuracy<std::size_t>(predicted, truth)));
  m.emplace_back("wall_seconds_evolution", fixed(t_evolution, 3));

  stage("write", [&] {
    const std::string pred = path_in(config, kPredictionsFile);
    write_text_atomic(pred, predictions);
    report.artifacts.push_back(pred);
    const std::string hist = path_in(config, kHistoryFile);
    write_history(result.history, hist);
    report.artifacts.push_back(hist);
    return 0;
  });
  m.emplace_back("wall_seconds", fixed(total.seconds(), 3));
  write_metrics_file(config, report);
  write_common(config, report);
  return report;
}

}  // namespace

RunReport run_pipeline(const RunConfig& config) {
  stage("config", [&] {
    config.validate();
    return 0;
  });
  prepare_output(config);
  return config.task == Task::kGraphEmbed ? run_graph_embed(config) : run_tabular(config);
}

RunReport run_sample(const RunConfig& config) {
  stage("config", [&] {
    config.validate();
    return 0;
  });
  prepare_output(config);
  if (config.task != Task::kGraphEmbed) throw StageError("config", "sample needs task = graph-embed", 1);
  RunReport report;
  const Graph graph = load_graph(config);
  const Pool pool = stage("sampling", [&] { return build_pool(graph, config.pool_size, config.sampler); });
  const double coverage = pool.coverage(graph);
  if (coverage < 1.0) {
    report.warnings.push_back("pool covers " + fixed(100.0 * coverage, 1) + "% of nodes");
  }
  report.metrics.emplace_back("nodes", std::to_string(graph.num_nodes()));
  report.metrics.emplace_back("edges", std::to_string(graph.num_edges()));
  report.metrics.emplace_back("pool_size", std::to_string(pool.size()));
  report.metrics.emplace_back("sub_network_size", std::to_string(pool.sub_network_size()));
  report.metrics.emplace_back("coverage", num(coverage));
  report.metrics.emplace_back("pool_bytes", std::to_string(pool.footprint_bytes()));
  stage("write", [&] {
    const std::string path = path_in(config, kPoolFile);
    write_text_atomic(path, format_pool(pool));
    report.artifacts.push_back(path);
    return 0;
  });
  write_metrics_file(config, report);
  write_common(config, report);
  return report;
}

RunReport run_evaluate(const RunConfig& config, const std::string& embeddings_path) {
  stage("config", [&] {
    config.eval.validate();
    if (config.input.empty()) throw ConfigError("input: evaluate needs an edge list");
    return 0;
  });
  prepare_output(config);
  RunReport report;
  const Graph graph = load_graph(config);
  const EmbeddingTable table = stage("load", [&] { return read_embeddings(embeddings_path); });
  Stopwatch total;
  auto& m = report.metrics;
  m.emplace_back("nodes", std::to_string(graph.num_nodes()));
  m.emplace_back("edges", std::to_string(graph.num_edges()));
  m.emplace_back("embedding_dim", std::to_string(table.dimension()));
  double seconds = 0.0;
  stage("evaluation", [&] {
    add_link_metrics(m, graph, table, config.eval, seconds);
    return 0;
  });
  m.emplace_back("wall_seconds", fixed(total.seconds(), 3));
  write_metrics_file(config, report);
  write_common(config, report);
  return report;
}

}  // namespace gen
