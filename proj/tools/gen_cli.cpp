// gen: evolve a population of shallow models over sampled sub-instances.
//
//   gen run      [--config PATH] [--seed N] [--out DIR] [--preset PS1|PS2] [key=value ...]
//   gen sample   (same flags; writes the sub-network pool only)
//   gen evaluate --embeddings PATH input=EDGES [flags ...]
//
// Exit status: 0 success, 1 configuration error, 2 runtime or numeric error.

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "gen/config.hpp"
#include "gen/errors.hpp"
#include "gen/io.hpp"
#include "gen/pipeline.hpp"

namespace {

struct Flags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string preset;
  std::vector<std::string> overrides;
};

void add_common(CLI::App* cmd, Flags& f) {
  cmd->add_option("--config", f.config_path, "key = value config file");
  cmd->add_option("--seed", f.seed, "master seed");
  cmd->add_option("--out", f.out, "output directory");
  cmd->add_option("--preset", f.preset, "PS1 or PS2")->check(CLI::IsMember({"PS1", "PS2"}));
  cmd->add_option("overrides", f.overrides, "key=value overrides");
}

gen::RunConfig resolve(const Flags& f) {
  std::string text;
  if (!f.config_path.empty()) {
    try {
      text = gen::read_text(f.config_path);
    } catch (const std::exception& e) {
      throw gen::ConfigError(std::string("--config: ") + e.what());
    }
  }
  // Flags act as overrides applied before the positional ones.
  std::vector<std::string> overrides;
  if (!f.preset.empty()) overrides.push_back("preset=" + f.preset);
  if (f.seed) overrides.push_back("seed=" + std::to_string(*f.seed));
  if (!f.out.empty()) overrides.push_back("output=" + f.out);
  overrides.insert(overrides.end(), f.overrides.begin(), f.overrides.end());
  return gen::parse_config(text, overrides);
}

void report(const gen::RunReport& r) {
  for (const auto& w : r.warnings) std::cerr << "warning: " << w << '\n';
  for (const auto& [k, v] : r.metrics) {
    if (k == "auc" || k == "prec_at_k" || k == "accuracy" || k == "coverage" || k == "wall_seconds") {
      std::cout << k << '\t' << v << '\n';
    }
  }
  for (const auto& a : r.artifacts) std::cout << "wrote " << a << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Evolutionary ensembles of shallow models"};
  app.require_subcommand(1);
  Flags flags;
  std::string embeddings;
  auto* run_cmd = app.add_subcommand("run", "full pipeline");
  auto* sample_cmd = app.add_subcommand("sample", "build the sub-network pool only");
  auto* eval_cmd = app.add_subcommand("evaluate", "score an embeddings file against an edge list");
  for (auto* cmd : {run_cmd, sample_cmd, eval_cmd}) add_common(cmd, flags);
  eval_cmd->add_option("--embeddings", embeddings, "embeddings file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    const gen::RunConfig config = resolve(flags);
    gen::RunReport r;
    if (*run_cmd) r = gen::run_pipeline(config);
    else if (*sample_cmd) r = gen::run_sample(config);
    else r = gen::run_evaluate(config, embeddings);
    report(r);
    return 0;
  } catch (const gen::ConfigError& e) {
    std::cerr << "config: " << e.what() << '\n';
    return 1;
  } catch (const gen::StageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
