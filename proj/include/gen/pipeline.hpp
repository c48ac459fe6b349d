#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "gen/config.hpp"
#include "gen/io.hpp"

namespace gen {

// A failure inside one pipeline stage. exit_code is 1 for configuration
// problems and 2 for everything else.
class StageError : public std::runtime_error {
 public:
  StageError(std::string stage, const std::string& what, int exit_code)
      : std::runtime_error(stage + ": " + what), stage_(std::move(stage)), exit_code_(exit_code) {}
  const std::string& stage() const noexcept { return stage_; }
  int exit_code() const noexcept { return exit_code_; }

 private:
  std::string stage_;
  int exit_code_;
};

struct RunReport {
  std::vector<std::string> artifacts;
  std::vector<std::string> warnings;
  MetricsFile metrics;
};

// Full pipeline for config.task; writes every artifact under config.output.
RunReport run_pipeline(const RunConfig& config);

// Samples the pool only and writes it with the resolved config.
RunReport run_sample(const RunConfig& config);

// Scores an existing embeddings file against the edge list at config.input.
RunReport run_evaluate(const RunConfig& config, const std::string& embeddings_path);

// Artifact names inside the output directory.
inline constexpr const char* kEmbeddingsFile = "embeddings.tsv";
inline constexpr const char* kHistoryFile = "history.tsv";
inline constexpr const char* kMetricsFile = "metrics.tsv";
inline constexpr const char* kConfigFile = "config.resolved";
inline constexpr const char* kPredictionsFile = "predictions.tsv";
inline constexpr const char* kPoolFile = "pool.tsv";

}  // namespace gen
