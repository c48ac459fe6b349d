#include <string>

#include "gen/errors.hpp"
#include "gen/unit_model.hpp"

namespace gen {

void ParamLayout::add(std::string name, std::size_t rows, std::size_t cols) {
  slices_.push_back(ParamSlice{std::move(name), rows, cols, total_});
  total_ += rows * cols;
}

void AutoencoderSpec::validate() const {
  if (input_dim == 0) throw ConfigError("autoencoder input_dim must be positive");
  if (latent_dim == 0) throw ConfigError("autoencoder latent_dim must be positive");
  for (auto h : encoder_hidden_dims) {
    if (h == 0) throw ConfigError("autoencoder hidden widths must be positive");
  }
}

std::vector<std::size_t> AutoencoderSpec::layer_dims() const {
  std::vector<std::size_t> dims{input_dim};
  dims.insert(dims.end(), encoder_hidden_dims.begin(), encoder_hidden_dims.end());
  dims.push_back(latent_dim);
  dims.insert(dims.end(), encoder_hidden_dims.rbegin(), encoder_hidden_dims.rend());
  dims.push_back(input_dim);
  return dims;
}

void MlpSpec::validate() const {
  if (input_dim == 0) throw ConfigError("mlp input_dim must be positive");
  if (num_classes < 2) throw ConfigError("mlp needs at least 2 classes");
  for (auto h : hidden_dims) {
    if (h == 0) throw ConfigError("mlp hidden widths must be positive");
  }
}

std::vector<std::size_t> MlpSpec::layer_dims() const {
  std::vector<std::size_t> dims{input_dim};
  dims.insert(dims.end(), hidden_dims.begin(), hidden_dims.end());
  dims.push_back(num_classes);
  return dims;
}

void TrainConfig::validate() const {
  if (!(learning_rate >= 0.0)) throw ConfigError("learning_rate must be non-negative");
  if (epochs_per_batch == 0) throw ConfigError("epochs_per_batch must be positive");
  if (!(alpha >= 0.0)) throw ConfigError("alpha must be non-negative");
  if (!(init_low < init_high)) throw ConfigError("init_low must be below init_high");
}

ParamLayout make_layout(const AutoencoderSpec& spec) {
  spec.validate();
  const auto dims = spec.layer_dims();
  const std::size_t latent = spec.latent_layer();
  ParamLayout layout;
  for (std::size_t k = 1; k < dims.size(); ++k) {
    // Encoder layers count up from 1; decoder layers count down to 1.
    const std::string name = k <= latent ? "enc" + std::to_string(k)
                                         : "dec" + std::to_string(dims.size() - k);
    layout.add(name + ".W", dims[k], dims[k - 1]);
    layout.add(name + ".b", dims[k], 1);
  }
  return layout;
}

ParamLayout make_layout(const MlpSpec& spec) {
  spec.validate();
  const auto dims = spec.layer_dims();
  ParamLayout layout;
  for (std::size_t k = 1; k < dims.size(); ++k) {
    const std::string name = "fc" + std::to_string(k);
    layout.add(name + ".W", dims[k], dims[k - 1]);
    layout.add(name + ".b", dims[k], 1);
  }
  return layout;
}

ParamVector init_model(const ParamLayout& layout, const TrainConfig& config, Rng& rng) {
  config.validate();
  ParamVector model(layout);
  const double width = config.init_high - config.init_low;
  for (auto& v : model.values) v = config.init_low + width * uniform01(rng);
  return model;
}

ParamVector init_model(const AutoencoderSpec& spec, const TrainConfig& config, Rng& rng) {
  return init_model(make_layout(spec), config, rng);
}

ParamVector init_model(const MlpSpec& spec, const TrainConfig& config, Rng& rng) {
  return init_model(make_layout(spec), config, rng);
}

double squared_norm(std::span<const double> values) {
  double s = 0.0;
  for (double v : values) s += v * v;
  return s;
}

}  // namespace gen
