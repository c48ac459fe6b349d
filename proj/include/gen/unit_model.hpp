#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "gen/graph.hpp"
#include "gen/matrix.hpp"
#include "gen/rng.hpp"

namespace gen {

// One named block of a flat parameter vector: a rows x cols weight matrix,
// or a bias vector stored as rows x 1.
struct ParamSlice {
  std::string name;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::size_t offset = 0;

  std::size_t size() const noexcept { return rows * cols; }
  bool operator==(const ParamSlice&) const = default;
};

class ParamLayout {
 public:
  ParamLayout() = default;

  void add(std::string name, std::size_t rows, std::size_t cols);

  const std::vector<ParamSlice>& slices() const noexcept { return slices_; }
  std::size_t total_size() const noexcept { return total_; }

  bool operator==(const ParamLayout&) const = default;

 private:
  std::vector<ParamSlice> slices_;
  std::size_t total_ = 0;
};

// The gene of one unit model: every weight and bias, flattened.
struct ParamVector {
  ParamLayout layout;
  std::vector<double> values;

  ParamVector() = default;
  explicit ParamVector(ParamLayout l, double fill = 0.0)
      : layout(std::move(l)), values(layout.total_size(), fill) {}

  std::size_t size() const noexcept { return values.size(); }
  std::span<double> slice(std::size_t i) {
    const auto& s = layout.slices()[i];
    return {values.data() + s.offset, s.size()};
  }
  std::span<const double> slice(std::size_t i) const {
    const auto& s = layout.slices()[i];
    return {values.data() + s.offset, s.size()};
  }
  bool operator==(const ParamVector&) const = default;
};

enum class Activation { kSigmoid };

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Encoder input_dim -> hidden... -> latent, decoder mirrored back to input_dim.
struct AutoencoderSpec {
  std::size_t input_dim = 10;
  std::vector<std::size_t> encoder_hidden_dims{8};
  std::size_t latent_dim = 16;
  Activation activation = Activation::kSigmoid;

  void validate() const;
  // Layer widths from input to reconstruction, e.g. {4, 3, 2, 3, 4}.
  std::vector<std::size_t> layer_dims() const;
  // Index into layer_dims() of the latent layer.
  std::size_t latent_layer() const { return encoder_hidden_dims.size() + 1; }
};

// Sigmoid hidden layers, softmax output.
struct MlpSpec {
  std::size_t input_dim = 1;
  std::vector<std::size_t> hidden_dims{16};
  std::size_t num_classes = 2;

  void validate() const;
  std::vector<std::size_t> layer_dims() const;
};

struct TrainConfig {
  double learning_rate = 0.01;
  std::size_t epochs_per_batch = 50;
  double alpha = 0.001;
  double init_low = 0.0;
  double init_high = 1.0;

  void validate() const;
};

struct LossBreakdown {
  double reconstruction = 0.0;  // ||A - A_hat||_F^2
  double proximity = 0.0;       // signed pairwise latent distance
  double regularization = 0.0;  // sum of squared parameters
  double total = 0.0;
};

ParamLayout make_layout(const AutoencoderSpec& spec);
ParamLayout make_layout(const MlpSpec& spec);

// Every entry uniform on [init_low, init_high).
ParamVector init_model(const ParamLayout& layout, const TrainConfig& config, Rng& rng);
ParamVector init_model(const AutoencoderSpec& spec, const TrainConfig& config, Rng& rng);
ParamVector init_model(const MlpSpec& spec, const TrainConfig& config, Rng& rng);

// ---------------------------------------------------------------------------
// Graph autoencoder

struct AutoencoderPass {
  // activations[0] is the input A; activations[k] the output of layer k.
  std::vector<Matrix> activations;

  const Matrix& latent(const AutoencoderSpec& spec) const { return activations[spec.latent_layer()]; }
  const Matrix& reconstruction() const { return activations.back(); }
};

AutoencoderPass forward(const ParamVector& model, const AutoencoderSpec& spec, const Matrix& adjacency);

// Sum over unordered pairs i<k of s(i,k) * ||z_i - z_k||^2 with s = +1 on
// edges and -1 otherwise.
double proximity_loss(const Matrix& z, const Matrix& adjacency);

// The same quantity through Tr(Z^T L Z), L = D - S over distinct pairs and
// D(i,i) = sum_k S(i,k).
double laplacian_trace_form(const Matrix& z, const Matrix& adjacency);

double squared_norm(std::span<const double> values);

LossBreakdown compute_losses(const ParamVector& model, const AutoencoderSpec& spec,
                             const SubNetwork& g, double alpha);

// Exact gradient of compute_losses(...).total.
ParamVector gradient(const ParamVector& model, const AutoencoderSpec& spec, const SubNetwork& g,
                     double alpha);

// Loss and gradient in one pass.
LossBreakdown loss_and_gradient(const ParamVector& model, const AutoencoderSpec& spec,
                                const SubNetwork& g, double alpha, ParamVector& grad);

// epochs_per_batch passes; one SGD step per sub-network per pass.
ParamVector train_on_batch(ParamVector model, const AutoencoderSpec& spec, const Batch& batch,
                           const TrainConfig& config);

// ---------------------------------------------------------------------------
// MLP classifier

struct LabeledRow {
  std::span<const double> features;
  std::size_t label = 0;
};

std::vector<double> mlp_forward(const ParamVector& model, const MlpSpec& spec,
                                std::span<const double> x);

std::size_t mlp_predict(const ParamVector& model, const MlpSpec& spec, std::span<const double> x);

struct MlpLossGradient {
  double loss = 0.0;  // mean cross-entropy
  ParamVector gradient;
};

MlpLossGradient mlp_loss_and_gradient(const ParamVector& model, const MlpSpec& spec,
                                      std::span<const LabeledRow> batch);

// Per-instance SGD on cross-entropy + alpha * sum of squared parameters.
ParamVector mlp_train_on_batch(ParamVector model, const MlpSpec& spec,
                               std::span<const LabeledRow> batch, const TrainConfig& config);

}  // namespace gen
