#include <algorithm>
#include <cmath>
#include <string>

#include "gen/errors.hpp"
#include "gen/unit_model.hpp"

namespace gen {
namespace {

void check_layout(const ParamVector& model, const MlpSpec& spec) {
  const auto dims = spec.layer_dims();
  const auto& slices = model.layout.slices();
  bool ok = slices.size() == 2 * (dims.size() - 1) && model.size() == model.layout.total_size();
  for (std::size_t k = 1; ok && k < dims.size(); ++k) {
    ok = slices[2 * (k - 1)].rows == dims[k] && slices[2 * (k - 1)].cols == dims[k - 1] &&
         slices[2 * (k - 1) + 1].rows == dims[k];
  }
  if (!ok) throw ShapeError("parameter layout does not match the mlp spec");
}

// Per-layer outputs for one example; the last entry holds class probabilities.
std::vector<std::vector<double>> mlp_activations(const ParamVector& model,
                                                 const std::vector<std::size_t>& dims,
                                                 std::span<const double> x) {
  std::vector<std::vector<double>> acts;
  acts.reserve(dims.size());
  acts.emplace_back(x.begin(), x.end());
  const std::size_t last = dims.size() - 1;
  for (std::size_t k = 1; k <= last; ++k) {
    auto w = model.slice(2 * (k - 1));
    auto b = model.slice(2 * (k - 1) + 1);
    const auto& in = acts.back();
    std::vector<double> out(dims[k]);
    for (std::size_t r = 0; r < dims[k]; ++r) {
      double acc = b[r];
      const double* wr = w.data() + r * dims[k - 1];
      for (std::size_t c = 0; c < dims[k - 1]; ++c) acc += wr[c] * in[c];
      out[r] = k == last ? acc : sigmoid(acc);
    }
    if (k == last) {
      const double peak = *std::max_element(out.begin(), out.end());
      double sum = 0.0;
      for (auto& v : out) sum += (v = std::exp(v - peak));
      for (auto& v : out) v /= sum;
    }
    acts.push_back(std::move(out));
  }
  return acts;
}

}  // namespace

std::vector<double> mlp_forward(const ParamVector& model, const MlpSpec& spec,
                                std::span<const double> x) {
  check_layout(model, spec);
  if (x.size() != spec.input_dim) {
    throw ShapeError("feature vector has " + std::to_string(x.size()) + " entries, expected " +
                     std::to_string(spec.input_dim));
  }
  return mlp_activations(model, spec.layer_dims(), x).back();
}

std::size_t mlp_predict(const ParamVector& model, const MlpSpec& spec, std::span<const double> x) {
  const auto probs = mlp_forward(model, spec, x);
  return static_cast<std::size_t>(std::max_element(probs.begin(), probs.end()) - probs.begin());
}

MlpLossGradient mlp_loss_and_gradient(const ParamVector& model, const MlpSpec& spec,
                                      std::span<const LabeledRow> batch) {
  check_layout(model, spec);
  if (batch.empty()) throw ConfigError("mlp batch must not be empty");
  const auto dims = spec.layer_dims();
  const std::size_t last = dims.size() - 1;
  const double scale = 1.0 / static_cast<double>(batch.size());

  MlpLossGradient result{0.0, ParamVector(model.layout)};
  for (const auto& row : batch) {
    if (row.label >= spec.num_classes) {
      throw ConfigError("label " + std::to_string(row.label) + " outside [0, " +
                        std::to_string(spec.num_classes) + ")");
    }
    if (row.features.size() != spec.input_dim) throw ShapeError("feature vector width mismatch");
    const auto acts = mlp_activations(model, dims, row.features);
    const auto& probs = acts.back();
    result.loss -= scale * std::log(std::max(probs[row.label], 1e-300));

    // Softmax + cross-entropy: dL/dlogit = p - onehot.
    std::vector<double> delta(probs);
    delta[row.label] -= 1.0;
    for (auto& d : delta) d *= scale;

    for (std::size_t k = last; k >= 1; --k) {
      const auto& in = acts[k - 1];
      auto w = model.slice(2 * (k - 1));
      auto gw = result.gradient.slice(2 * (k - 1));
      auto gb = result.gradient.slice(2 * (k - 1) + 1);
      std::vector<double> back(dims[k - 1], 0.0);
      for (std::size_t r = 0; r < dims[k]; ++r) {
        gb[r] += delta[r];
        for (std::size_t c = 0; c < dims[k - 1]; ++c) {
          gw[r * dims[k - 1] + c] += delta[r] * in[c];
          back[c] += delta[r] * w[r * dims[k - 1] + c];
        }
      }
      if (k > 1) {
        for (std::size_t c = 0; c < back.size(); ++c) back[c] *= in[c] * (1.0 - in[c]);
      }
      delta = std::move(back);
    }
  }
  return result;
}

ParamVector mlp_train_on_batch(ParamVector model, const MlpSpec& spec,
                               std::span<const LabeledRow> batch, const TrainConfig& config) {
  if (batch.empty()) throw ConfigError("training batch must not be empty");
  for (std::size_t epoch = 0; epoch < config.epochs_per_batch; ++epoch) {
    for (std::size_t i = 0; i < batch.size(); ++i) {
      auto step = mlp_loss_and_gradient(model, spec, batch.subspan(i, 1));
      bool finite = std::isfinite(step.loss);
      for (double v : step.gradient.values) finite = finite && std::isfinite(v);
      if (!finite) throw NumericError("non-finite loss or gradient in epoch " + std::to_string(epoch));
      for (std::size_t t = 0; t < model.size(); ++t) {
        model.values[t] -= config.learning_rate *
                           (step.gradient.values[t] + 2.0 * config.alpha * model.values[t]);
      }
    }
  }
  return model;
}

}  // namespace gen
