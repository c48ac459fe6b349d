#include "gen/config.hpp"

#include <charconv>
#include <functional>
#include <map>
#include <sstream>

#include "gen/errors.hpp"

namespace gen {

std::string_view to_string(Task t) {
  return t == Task::kGraphEmbed ? "graph-embed" : "tabular-classify";
}

std::string_view to_string(EnsembleMode m) {
  switch (m) {
    case EnsembleMode::kAuto:
      return "auto";
    case EnsembleMode::kConcat:
      return "concat";
    case EnsembleMode::kBest:
      return "best";
  }
  return "?";
}

void RunConfig::resolve() {
  sampler.seed = seed;
  evolution.seed = seed;
  eval.seed = seed;
  autoencoder.input_dim = sampler.sub_network_size;
  evolution.validation_size = validation_size != 0 ? validation_size : evolution.batch_size;
}

EnsembleMode RunConfig::effective_ensemble() const {
  if (ensemble != EnsembleMode::kAuto) return ensemble;
  return task == Task::kGraphEmbed ? EnsembleMode::kConcat : EnsembleMode::kBest;
}

void RunConfig::validate() const {
  if (sampler.sub_network_size < 2) throw ConfigError("sub_network_size: must be at least 2");
  if (pool_size == 0) throw ConfigError("pool_size: must be positive");
  if (output.empty()) throw ConfigError("output: must not be empty");
  if (task == Task::kTabularClassify && input.empty()) {
    throw ConfigError("input: tabular-classify needs a CSV path");
  }
  if (sbm_blocks.empty()) throw ConfigError("sbm_blocks: needs at least one block");
  if (!(sbm_p_out >= 0.0 && sbm_p_out < sbm_p_in && sbm_p_in <= 1.0)) {
    throw ConfigError("sbm_p_in/sbm_p_out: need 0 <= sbm_p_out < sbm_p_in <= 1");
  }
  for (std::size_t h : mlp_hidden_dims) {
    if (h == 0) throw ConfigError("mlp_hidden_dims: widths must be positive");
  }
  autoencoder.validate();
  train.validate();
  evolution.validate();
  eval.validate();
}

void apply_preset(RunConfig& c, std::string_view name) {
  if (name == "PS1") {
    c.sampler.sub_network_size = 10;
    c.pool_size = 200;
    c.evolution.batch_size = 10;
    c.evolution.population = 10;
    c.evolution.generations = 20;
    c.evolution.mutation_probability = 0.01;
    c.eval.np_ratio = 1;
  } else if (name == "PS2") {
    c.sampler.sub_network_size = 30;
    c.pool_size = 400;
    c.evolution.batch_size = 35;
    c.evolution.population = 20;
    c.evolution.generations = 20;
    c.evolution.mutation_probability = 0.01;
    c.eval.np_ratio = 1;
  } else {
    throw ConfigError("preset: unknown preset '" + std::string(name) + "' (expected PS1 or PS2)");
  }
  c.autoencoder.input_dim = c.sampler.sub_network_size;
}

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

struct ValueError {
  std::string what;
};

std::uint64_t parse_u64(std::string_view v) {
  std::uint64_t out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size() || v.empty()) {
    throw ValueError{"expected a non-negative integer, got '" + std::string(v) + "'"};
  }
  return out;
}

std::size_t parse_size(std::string_view v) { return static_cast<std::size_t>(parse_u64(v)); }

std::size_t parse_positive(std::string_view v) {
  const std::size_t out = parse_size(v);
  if (out == 0) throw ValueError{"must be a positive integer, got '" + std::string(v) + "'"};
  return out;
}

double parse_double(std::string_view v) {
  double out = 0.0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size() || v.empty()) {
    throw ValueError{"expected a number, got '" + std::string(v) + "'"};
  }
  return out;
}

std::vector<std::size_t> parse_list(std::string_view v) {
  std::vector<std::size_t> out;
  if (trim(v).empty() || trim(v) == "none") return out;
  while (true) {
    const auto comma = v.find(',');
    out.push_back(parse_positive(trim(v.substr(0, comma))));
    if (comma == std::string_view::npos) break;
    v.remove_prefix(comma + 1);
  }
  return out;
}

std::string format_list(const std::vector<std::size_t>& xs) {
  if (xs.empty()) return "none";
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(xs[i]);
  }
  return out;
}

std::string format_double(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

using Setter = std::function<void(RunConfig&, std::string_view)>;

const std::map<std::string, Setter, std::less<>>& setters() {
  static const std::map<std::string, Setter, std::less<>> table = {
      {"task",
       [](RunConfig& c, std::string_view v) {
         if (v == "graph-embed") c.task = Task::kGraphEmbed;
         else if (v == "tabular-classify") c.task = Task::kTabularClassify;
         else throw ValueError{"expected graph-embed or tabular-classify"};
       }},
      {"input", [](RunConfig& c, std::string_view v) { c.input = std::string(v); }},
      {"output", [](RunConfig& c, std::string_view v) { c.output = std::string(v); }},
      {"seed", [](RunConfig& c, std::string_view v) { c.seed = parse_u64(v); }},
      {"strategy",
       [](RunConfig& c, std::string_view v) {
         auto s = parse_sampling_strategy(v);
         if (!s) throw ValueError{"expected uniform-node, bfs or dfs"};
         c.sampler.strategy = *s;
       }},
      {"sub_network_size",
       [](RunConfig& c, std::string_view v) { c.sampler.sub_network_size = parse_positive(v); }},
      {"pool_size", [](RunConfig& c, std::string_view v) { c.pool_size = parse_positive(v); }},
      {"batch_size",
       [](RunConfig& c, std::string_view v) { c.evolution.batch_size = parse_positive(v); }},
      {"validation_size",
       [](RunConfig& c, std::string_view v) { c.validation_size = parse_size(v); }},
      {"population",
       [](RunConfig& c, std::string_view v) { c.evolution.population = parse_positive(v); }},
      {"generations",
       [](RunConfig& c, std::string_view v) { c.evolution.generations = parse_positive(v); }},
      {"mutation_probability",
       [](RunConfig& c, std::string_view v) { c.evolution.mutation_probability = parse_double(v); }},
      {"threads", [](RunConfig& c, std::string_view v) { c.evolution.threads = parse_size(v); }},
      {"learning_rate",
       [](RunConfig& c, std::string_view v) { c.train.learning_rate = parse_double(v); }},
      {"epochs_per_batch",
       [](RunConfig& c, std::string_view v) { c.train.epochs_per_batch = parse_positive(v); }},
      {"alpha", [](RunConfig& c, std::string_view v) { c.train.alpha = parse_double(v); }},
      {"init_low", [](RunConfig& c, std::string_view v) { c.train.init_low = parse_double(v); }},
      {"init_high", [](RunConfig& c, std::string_view v) { c.train.init_high = parse_double(v); }},
      {"hidden_dims",
       [](RunConfig& c, std::string_view v) { c.autoencoder.encoder_hidden_dims = parse_list(v); }},
      {"latent_dim",
       [](RunConfig& c, std::string_view v) { c.autoencoder.latent_dim = parse_positive(v); }},
      {"mlp_hidden_dims",
       [](RunConfig& c, std::string_view v) { c.mlp_hidden_dims = parse_list(v); }},
      {"np_ratio", [](RunConfig& c, std::string_view v) { c.eval.np_ratio = parse_positive(v); }},
      {"prec_k", [](RunConfig& c, std::string_view v) { c.eval.k = parse_size(v); }},
      {"scorer",
       [](RunConfig& c, std::string_view v) {
         auto s = parse_scorer(v);
         if (!s) throw ValueError{"expected cosine, dot or neg-euclidean"};
         c.eval.scorer = *s;
       }},
      {"ensemble",
       [](RunConfig& c, std::string_view v) {
         if (v == "auto") c.ensemble = EnsembleMode::kAuto;
         else if (v == "concat") c.ensemble = EnsembleMode::kConcat;
         else if (v == "best") c.ensemble = EnsembleMode::kBest;
         else throw ValueError{"expected auto, concat or best"};
       }},
      {"sbm_blocks", [](RunConfig& c, std::string_view v) { c.sbm_blocks = parse_list(v); }},
      {"sbm_p_in", [](RunConfig& c, std::string_view v) { c.sbm_p_in = parse_double(v); }},
      {"sbm_p_out", [](RunConfig& c, std::string_view v) { c.sbm_p_out = parse_double(v); }},
  };
  return table;
}

struct Entry {
  std::string key;
  std::string value;
  std::string where;  // "line N" or "override 'k=v'"
};

Entry split_entry(std::string_view text, std::string where) {
  const auto eq = text.find('=');
  if (eq == std::string_view::npos) throw ConfigError(where + ": expected 'key = value'");
  Entry e{std::string(trim(text.substr(0, eq))), std::string(trim(text.substr(eq + 1))), std::move(where)};
  if (e.key.empty()) throw ConfigError(e.where + ": missing key");
  return e;
}

void apply_entry(RunConfig& c, const Entry& e) {
  const auto& table = setters();
  auto it = table.find(e.key);
  if (it == table.end()) throw ConfigError(e.where + ": unknown key '" + e.key + "'");
  try {
    it->second(c, e.value);
  } catch (const ValueError& err) {
    throw ConfigError(e.where + ": " + e.key + ": " + err.what);
  }
}

}  // namespace

RunConfig parse_config(std::string_view file_text, const std::vector<std::string>& overrides) {
  std::vector<Entry> file_entries;
  std::istringstream lines{std::string(file_text)};
  std::string raw;
  for (std::size_t line_no = 1; std::getline(lines, raw); ++line_no) {
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (!line.empty()) file_entries.push_back(split_entry(line, "line " + std::to_string(line_no)));
  }
  std::vector<Entry> override_entries;
  for (const auto& o : overrides) override_entries.push_back(split_entry(o, "override '" + o + "'"));

  RunConfig config;
  // The preset is applied first so that explicit keys refine it.
  const Entry* preset = nullptr;
  for (const auto* entries : {&file_entries, &override_entries}) {
    for (const auto& e : *entries) {
      if (e.key == "preset") preset = &e;
    }
  }
  if (preset) {
    try {
      apply_preset(config, preset->value);
    } catch (const ConfigError& err) {
      throw ConfigError(preset->where + ": " + err.what());
    }
  }
  for (const auto* entries : {&file_entries, &override_entries}) {
    for (const auto& e : *entries) {
      if (e.key != "preset") apply_entry(config, e);
    }
  }
  config.resolve();
  try {
    config.validate();
  } catch (const ConfigError& err) {
    // Attribute the violation to the last source line that set a key it names.
    const std::string msg = err.what();
    const Entry* origin = nullptr;
    for (const auto* entries : {&file_entries, &override_entries}) {
      for (const auto& e : *entries) {
        if (msg.find(e.key) != std::string::npos) origin = &e;
      }
    }
    throw ConfigError(origin ? origin->where + ": " + msg : msg);
  }
  return config;
}

std::string format_config(const RunConfig& c) {
  std::ostringstream os;
  os << "task = " << to_string(c.task) << '\n'
     << "input = " << c.input << '\n'
     << "output = " << c.output << '\n'
     << "seed = " << c.seed << '\n'
     << "strategy = " << to_string(c.sampler.strategy) << '\n'
     << "sub_network_size = " << c.sampler.sub_network_size << '\n'
     << "pool_size = " << c.pool_size << '\n'
     << "batch_size = " << c.evolution.batch_size << '\n'
     << "validation_size = " << c.validation_size << '\n'
     << "population = " << c.evolution.population << '\n'
     << "generations = " << c.evolution.generations << '\n'
     << "mutation_probability = " << format_double(c.evolution.mutation_probability) << '\n'
     << "threads = " << c.evolution.threads << '\n'
     << "learning_rate = " << format_double(c.train.learning_rate) << '\n'
     << "epochs_per_batch = " << c.train.epochs_per_batch << '\n'
     << "alpha = " << format_double(c.train.alpha) << '\n'
     << "init_low = " << format_double(c.train.init_low) << '\n'
     << "init_high = " << format_double(c.train.init_high) << '\n'
     << "hidden_dims = " << format_list(c.autoencoder.encoder_hidden_dims) << '\n'
     << "latent_dim = " << c.autoencoder.latent_dim << '\n'
     << "mlp_hidden_dims = " << format_list(c.mlp_hidden_dims) << '\n'
     << "np_ratio = " << c.eval.np_ratio << '\n'
     << "prec_k = " << c.eval.k << '\n'
     << "scorer = " << to_string(c.eval.scorer) << '\n'
     << "ensemble = " << to_string(c.ensemble) << '\n'
     << "sbm_blocks = " << format_list(c.sbm_blocks) << '\n'
     << "sbm_p_in = " << format_double(c.sbm_p_in) << '\n'
     << "sbm_p_out = " << format_double(c.sbm_p_out) << '\n';
  return os.str();
}

}  // namespace gen
