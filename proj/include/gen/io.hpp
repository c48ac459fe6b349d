#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gen/ensemble.hpp"
#include "gen/evolution.hpp"
#include "gen/graph.hpp"
#include "gen/matrix.hpp"
#include "gen/unit_model.hpp"

namespace gen {

// Writes to a sibling temporary file and renames it over `path`.
void write_text_atomic(const std::string& path, std::string_view content);
std::string read_text(const std::string& path);

// "# nodes=<N> dim=<D>" then one tab-separated row per node: id, D values
// with 9 significant digits.
std::string format_embeddings(const EmbeddingTable& table);
EmbeddingTable parse_embeddings(std::string_view text);
void write_embeddings(const EmbeddingTable& table, const std::string& path);
EmbeddingTable read_embeddings(const std::string& path);

// Header "generation\tbest_loss\tmean_loss\tdelta_Lc", one row per generation.
std::string format_history(const RunHistory& history);
RunHistory parse_history(std::string_view text);
void write_history(const RunHistory& history, const std::string& path);

// Ordered "key\tvalue" lines.
using MetricsFile = std::vector<std::pair<std::string, std::string>>;
std::string format_metrics(const MetricsFile& metrics);
MetricsFile parse_metrics(std::string_view text);

// One line per pool member: index then its global node ids.
std::string format_pool(const Pool& pool);

struct TabularDataset {
  Matrix features;  // min-max scaled with train statistics
  std::vector<std::size_t> labels;
  std::vector<std::string> class_names;  // index = label
  std::vector<std::size_t> train;
  std::vector<std::size_t> validation;
  std::vector<std::size_t> test;

  std::size_t num_columns() const noexcept { return features.cols(); }
  std::size_t num_classes() const noexcept { return class_names.size(); }
  std::vector<LabeledRow> rows(const std::vector<std::size_t>& indices) const;
};

// Comma-separated numeric features, label token in the last column. Labels
// are numbered by first appearance; the split is stratified 70/15/15.
TabularDataset parse_tabular_csv(std::string_view text, std::uint64_t split_seed);
TabularDataset load_tabular_csv(const std::string& path, std::uint64_t split_seed);

// Per-class counts for a stratified split. Train gets round(0.7 N) rows and
// validation floor(0.15 N) overall, allocated to classes by largest
// remainder; every class keeps at least one training row.
struct SplitCounts {
  std::vector<std::size_t> train, validation, test;
};
SplitCounts stratified_counts(const std::vector<std::size_t>& class_sizes);

}  // namespace gen
