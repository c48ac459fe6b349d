#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>

#include "gen/config.hpp"
#include "gen/errors.hpp"
#include "gen/io.hpp"

using namespace gen;

namespace {

std::string error_of(const std::string& text, const std::vector<std::string>& overrides = {}) {
  try {
    parse_config(text, overrides);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("gen_io_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST(Config, EmptyFileGivesDefaults) {
  const RunConfig c = parse_config("");
  EXPECT_EQ(c.sampler.sub_network_size, 10u);
  EXPECT_EQ(c.pool_size, 200u);
  EXPECT_EQ(c.evolution.batch_size, 10u);
  EXPECT_EQ(c.evolution.population, 10u);
  EXPECT_EQ(c.evolution.generations, 20u);
  EXPECT_EQ(c.evolution.mutation_probability, 0.01);
  EXPECT_EQ(c.eval.np_ratio, 1u);
  EXPECT_EQ(c.autoencoder.input_dim, 10u);
  EXPECT_EQ(c.task, Task::kGraphEmbed);
  EXPECT_EQ(c.sampler.seed, c.seed);
  EXPECT_EQ(c.evolution.seed, c.seed);
}

TEST(Config, PresetPS2) {
  const RunConfig c = parse_config("preset = PS2\n");
  EXPECT_EQ(c.sampler.sub_network_size, 30u);
  EXPECT_EQ(c.pool_size, 400u);
  EXPECT_EQ(c.evolution.batch_size, 35u);
  EXPECT_EQ(c.evolution.population, 20u);
  EXPECT_EQ(c.evolution.generations, 20u);
  EXPECT_EQ(c.evolution.mutation_probability, 0.01);
  EXPECT_EQ(c.autoencoder.input_dim, 30u);
  EXPECT_EQ(c.evolution.validation_size, 35u);
}

TEST(Config, ValidationSizeFollowsBatchSize) {
  EXPECT_EQ(parse_config("").evolution.validation_size, 10u);
  EXPECT_EQ(parse_config("batch_size = 17").evolution.validation_size, 17u);
  EXPECT_EQ(parse_config("batch_size = 17\nvalidation_size = 4").evolution.validation_size, 4u);
}

TEST(Config, PresetPS1IsTheDefault) {
  EXPECT_EQ(format_config(parse_config("preset = PS1")), format_config(parse_config("")));
}

TEST(Config, Precedence) {
  // Preset < file < overrides, regardless of where the preset is named.
  const RunConfig c = parse_config("pool_size = 50\npreset = PS2\nseed = 3\n", {"seed=9"});
  EXPECT_EQ(c.pool_size, 50u);
  EXPECT_EQ(c.sampler.sub_network_size, 30u);
  EXPECT_EQ(c.seed, 9u);
  EXPECT_EQ(parse_config("", {"preset=PS2", "population=5"}).evolution.population, 5u);
}

TEST(Config, CommentsAndWhitespace) {
  const RunConfig c = parse_config("  # comment\n\nlearning_rate = 0.5   # trailing\n");
  EXPECT_EQ(c.train.learning_rate, 0.5);
}

TEST(Config, ErrorsNameKeyAndLine) {
  EXPECT_NE(error_of("\nbogus = 1").find("line 2"), std::string::npos);
  EXPECT_NE(error_of("\nbogus = 1").find("bogus"), std::string::npos);
  const std::string neg = error_of("generations = -1");
  EXPECT_NE(neg.find("generations"), std::string::npos);
  EXPECT_NE(neg.find("line 1"), std::string::npos);
  const std::string pop = error_of("seed = 1\npopulation = 1\n");
  EXPECT_NE(pop.find("population"), std::string::npos);
  EXPECT_NE(pop.find("line 2"), std::string::npos);
  EXPECT_NE(error_of("", {"mutation_probability=2"}).find("mutation_probability"), std::string::npos);
  EXPECT_NE(error_of("strategy = spiral").find("strategy"), std::string::npos);
  EXPECT_NE(error_of("preset = PS3").find("PS3"), std::string::npos);
  EXPECT_NE(error_of("no equals sign").find("line 1"), std::string::npos);
}

TEST(Config, FormatRoundTrips) {
  const RunConfig c = parse_config("preset = PS2\nhidden_dims = 12,6\nscorer = dot\nalpha = 0.125\n"
                                   "task = tabular-classify\ninput = x.csv\nmlp_hidden_dims = none\n");
  const std::string text = format_config(c);
  EXPECT_EQ(format_config(parse_config(text)), text);
  EXPECT_TRUE(parse_config(text).mlp_hidden_dims.empty());
}

TEST(Embeddings, RoundTrip) {
  EmbeddingTable t({3, 10, 42}, 4);
  Rng rng(2);
  for (std::size_t i = 0; i < 3; ++i) {
    for (double& v : t.row_at(i)) v = (uniform01(rng) - 0.3) * std::pow(10.0, uniform_index(rng, 7) - 3.0);
  }
  const std::string text = format_embeddings(t);
  EXPECT_EQ(text.substr(0, text.find('\n')), "# nodes=3 dim=4");
  const EmbeddingTable back = parse_embeddings(text);
  ASSERT_EQ(back.nodes(), t.nodes());
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t c = 0; c < 4; ++c) {
      EXPECT_LE(std::abs(back.row_at(i)[c] - t.row_at(i)[c]), 1e-8 * std::abs(t.row_at(i)[c]));
    }
  }
}

TEST(Embeddings, TruncatedFileIsAnError) {
  EmbeddingTable t({1, 2, 3}, 2);
  const std::string text = format_embeddings(t);
  const std::string missing_row = text.substr(0, text.rfind('\n', text.size() - 2) + 1);
  try {
    parse_embeddings(missing_row);
    FAIL();
  } catch (const FormatError& e) {
    EXPECT_EQ(e.line(), 4u);
  }
  const std::string cut_row = text.substr(0, text.size() - 3);
  try {
    parse_embeddings(cut_row);
    FAIL();
  } catch (const FormatError& e) {
    EXPECT_EQ(e.line(), 4u);
  }
  EXPECT_THROW(parse_embeddings("nodes=3\n"), FormatError);
  EXPECT_THROW(parse_embeddings(""), FormatError);
}

TEST(Embeddings, FileRoundTripIsAtomic) {
  const auto dir = scratch("emb");
  EmbeddingTable t({5}, 1);
  t.row(5)[0] = 0.25;
  const std::string path = (dir / "e.tsv").string();
  write_embeddings(t, path);
  EXPECT_FALSE(std::filesystem::exists(path + ".tmp"));
  EXPECT_EQ(read_embeddings(path), t);
}

TEST(History, RowsHeaderAndFirstDelta) {
  RunHistory h;
  for (std::size_t j = 1; j <= 20; ++j) h.push_back({j, -1.5 * j, 2.0 * j, 0.0, 7.0 + j, 0.0});
  const std::string text = format_history(h);
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 21);
  EXPECT_EQ(text.substr(0, text.find('\n')), "generation\tbest_loss\tmean_loss\tdelta_Lc");
  const RunHistory back = parse_history(text);
  ASSERT_EQ(back.size(), 20u);
  EXPECT_EQ(back[0].delta_proximity, 0.0);
  EXPECT_EQ(back[1].delta_proximity, 9.0);
  EXPECT_EQ(back[19].generation, 20u);
  EXPECT_EQ(back[19].best_loss, -30.0);
}

TEST(Tabular, TenRowSplit) {
  std::string csv;
  for (int i = 0; i < 10; ++i) csv += std::to_string(i) + "," + std::to_string(10 - i) + "," + (i % 2 ? "b" : "a") + "\n";
  const TabularDataset ds = parse_tabular_csv(csv, 1);
  EXPECT_EQ(ds.train.size(), 7u);
  EXPECT_EQ(ds.validation.size(), 1u);
  EXPECT_EQ(ds.test.size(), 2u);
  EXPECT_EQ(ds.class_names, (std::vector<std::string>{"a", "b"}));
  std::set<std::size_t> train_classes;
  for (auto i : ds.train) train_classes.insert(ds.labels[i]);
  EXPECT_EQ(train_classes.size(), 2u);
}

TEST(Tabular, SplitsAreDisjointExhaustiveAndSeeded) {
  std::string csv;
  Rng rng(4);
  for (int i = 0; i < 97; ++i) {
    csv += std::to_string(uniform01(rng) * 50) + "," + std::to_string(uniform01(rng)) + ",c" +
           std::to_string(uniform_index(rng, 4)) + "\n";
  }
  const TabularDataset a = parse_tabular_csv(csv, 7);
  const TabularDataset b = parse_tabular_csv(csv, 7);
  const TabularDataset c = parse_tabular_csv(csv, 8);
  EXPECT_EQ(a.train, b.train);
  EXPECT_EQ(a.test, b.test);
  EXPECT_NE(a.train, c.train);
  std::vector<std::size_t> all = a.train;
  all.insert(all.end(), a.validation.begin(), a.validation.end());
  all.insert(all.end(), a.test.begin(), a.test.end());
  std::sort(all.begin(), all.end());
  for (std::size_t i = 0; i < 97; ++i) ASSERT_EQ(all[i], i);
  EXPECT_EQ(a.train.size(), 68u);
  EXPECT_EQ(a.validation.size(), 14u);
  for (auto i : a.train) {
    for (double v : a.features.row(i)) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
  }
}

TEST(Tabular, StratifiedCountsKeepEveryClassInTrain) {
  const auto s = stratified_counts({1, 1, 1, 50});
  for (std::size_t c = 0; c < 4; ++c) EXPECT_GE(s.train[c], 1u);
  std::size_t total = 0;
  for (std::size_t c = 0; c < 4; ++c) total += s.train[c] + s.validation[c] + s.test[c];
  EXPECT_EQ(total, 53u);
}

TEST(Tabular, ErrorsCarryRowNumbers) {
  try {
    parse_tabular_csv("1,2,a\n1,b\n", 0);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
  try {
    parse_tabular_csv("1,2,a\n1,2,b\nx,2,a\n", 0);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
}

TEST(Metrics, RoundTrip) {
  const MetricsFile m{{"auc", "0.5"}, {"wall_seconds", "1.000"}};
  EXPECT_EQ(parse_metrics(format_metrics(m)), m);
}
