#include <cmath>
#include <string>

#include "gen/errors.hpp"
#include "gen/unit_model.hpp"

namespace gen {
namespace {

void check_shapes(const ParamVector& model, const AutoencoderSpec& spec, const Matrix& adjacency) {
  if (adjacency.rows() != adjacency.cols()) throw ShapeError("adjacency must be square");
  if (adjacency.cols() != spec.input_dim) {
    throw ShapeError("adjacency width " + std::to_string(adjacency.cols()) +
                     " does not match input_dim " + std::to_string(spec.input_dim));
  }
  const auto dims = spec.layer_dims();
  const auto& slices = model.layout.slices();
  bool ok = slices.size() == 2 * (dims.size() - 1) && model.size() == model.layout.total_size();
  for (std::size_t k = 1; ok && k < dims.size(); ++k) {
    const auto& w = slices[2 * (k - 1)];
    const auto& b = slices[2 * (k - 1) + 1];
    ok = w.rows == dims[k] && w.cols == dims[k - 1] && b.rows == dims[k] && b.cols == 1;
  }
  if (!ok) throw ShapeError("parameter layout does not match the autoencoder spec");
}

// out(i, r) = sigmoid(sum_c W(r, c) * in(i, c) + b(r))
Matrix dense_sigmoid(const Matrix& in, std::span<const double> w, std::span<const double> b,
                     std::size_t out_dim) {
  const std::size_t n = in.rows();
  const std::size_t in_dim = in.cols();
  Matrix out(n, out_dim);
  for (std::size_t i = 0; i < n; ++i) {
    auto x = in.row(i);
    for (std::size_t r = 0; r < out_dim; ++r) {
      double acc = b[r];
      const double* wr = w.data() + r * in_dim;
      for (std::size_t c = 0; c < in_dim; ++c) acc += wr[c] * x[c];
      out(i, r) = sigmoid(acc);
    }
  }
  return out;
}

}  // namespace

AutoencoderPass forward(const ParamVector& model, const AutoencoderSpec& spec, const Matrix& adjacency) {
  check_shapes(model, spec, adjacency);
  const auto dims = spec.layer_dims();
  AutoencoderPass pass;
  pass.activations.reserve(dims.size());
  pass.activations.push_back(adjacency);
  for (std::size_t k = 1; k < dims.size(); ++k) {
    pass.activations.push_back(
        dense_sigmoid(pass.activations.back(), model.slice(2 * (k - 1)), model.slice(2 * (k - 1) + 1), dims[k]));
  }
  return pass;
}

double proximity_loss(const Matrix& z, const Matrix& adjacency) {
  const std::size_t n = z.rows();
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = i + 1; k < n; ++k) {
      double dist = 0.0;
      for (std::size_t c = 0; c < z.cols(); ++c) {
        const double d = z(i, c) - z(k, c);
        dist += d * d;
      }
      total += (adjacency(i, k) != 0.0 ? 1.0 : -1.0) * dist;
    }
  }
  return total;
}

double laplacian_trace_form(const Matrix& z, const Matrix& adjacency) {
  const std::size_t n = z.rows();
  // S(i,k) = +/-1 off the diagonal, S(i,i) = 0; L = D - S.
  Matrix laplacian(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < n; ++k) {
      if (i == k) continue;
      const double s = adjacency(i, k) != 0.0 ? 1.0 : -1.0;
      laplacian(i, k) = -s;
      laplacian(i, i) += s;
    }
  }
  double trace = 0.0;
  for (std::size_t c = 0; c < z.cols(); ++c) {
    for (std::size_t i = 0; i < n; ++i) {
      double lz = 0.0;
      for (std::size_t k = 0; k < n; ++k) lz += laplacian(i, k) * z(k, c);
      trace += z(i, c) * lz;
    }
  }
  return trace;
}

LossBreakdown compute_losses(const ParamVector& model, const AutoencoderSpec& spec,
                             const SubNetwork& g, double alpha) {
  const auto pass = forward(model, spec, g.adjacency);
  LossBreakdown loss;
  const auto& a_hat = pass.reconstruction();
  for (std::size_t t = 0; t < a_hat.size(); ++t) {
    const double d = g.adjacency.data()[t] - a_hat.data()[t];
    loss.reconstruction += d * d;
  }
  loss.proximity = proximity_loss(pass.latent(spec), g.adjacency);
  loss.regularization = squared_norm(model.values);
  loss.total = loss.reconstruction + loss.proximity + alpha * loss.regularization;
  return loss;
}

LossBreakdown loss_and_gradient(const ParamVector& model, const AutoencoderSpec& spec,
                                const SubNetwork& g, double alpha, ParamVector& grad) {
  const auto pass = forward(model, spec, g.adjacency);
  const auto dims = spec.layer_dims();
  const std::size_t n = g.size();
  const std::size_t last = dims.size() - 1;
  const std::size_t latent = spec.latent_layer();
  const Matrix& a = g.adjacency;

  LossBreakdown loss;
  grad = ParamVector(model.layout);

  // dL/d(output of the current layer), seeded by the reconstruction term.
  Matrix upstream(n, dims[last]);
  const Matrix& a_hat = pass.reconstruction();
  for (std::size_t t = 0; t < a_hat.size(); ++t) {
    const double d = a_hat.data()[t] - a.data()[t];
    loss.reconstruction += d * d;
    upstream.data()[t] = 2.0 * d;
  }

  const Matrix& z = pass.latent(spec);
  loss.proximity = proximity_loss(z, a);

  for (std::size_t k = last; k >= 1; --k) {
    if (k == latent) {
      // d/dz_i of sum_{i<k} s_ik ||z_i - z_k||^2 = sum_{k != i} 2 s_ik (z_i - z_k)
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
          const double s = a(i, j) != 0.0 ? 2.0 : -2.0;
          for (std::size_t c = 0; c < z.cols(); ++c) {
            const double d = s * (z(i, c) - z(j, c));
            upstream(i, c) += d;
            upstream(j, c) -= d;
          }
        }
      }
    }
    const Matrix& out = pass.activations[k];
    const Matrix& in = pass.activations[k - 1];
    const std::size_t out_dim = dims[k];
    const std::size_t in_dim = dims[k - 1];
    auto w = model.slice(2 * (k - 1));
    auto gw = grad.slice(2 * (k - 1));
    auto gb = grad.slice(2 * (k - 1) + 1);
    Matrix next(n, in_dim);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t r = 0; r < out_dim; ++r) {
        const double y = out(i, r);
        const double delta = upstream(i, r) * y * (1.0 - y);
        gb[r] += delta;
        double* gwr = gw.data() + r * in_dim;
        const double* wr = w.data() + r * in_dim;
        for (std::size_t c = 0; c < in_dim; ++c) {
          gwr[c] += delta * in(i, c);
          next(i, c) += delta * wr[c];
        }
      }
    }
    upstream = std::move(next);
  }

  loss.regularization = squared_norm(model.values);
  for (std::size_t t = 0; t < model.size(); ++t) grad.values[t] += 2.0 * alpha * model.values[t];
  loss.total = loss.reconstruction + loss.proximity + alpha * loss.regularization;
  return loss;
}

ParamVector gradient(const ParamVector& model, const AutoencoderSpec& spec, const SubNetwork& g,
                     double alpha) {
  ParamVector grad;
  loss_and_gradient(model, spec, g, alpha, grad);
  return grad;
}

ParamVector train_on_batch(ParamVector model, const AutoencoderSpec& spec, const Batch& batch,
                           const TrainConfig& config) {
  if (batch.empty()) throw ConfigError("training batch must not be empty");
  ParamVector grad;
  for (std::size_t epoch = 0; epoch < config.epochs_per_batch; ++epoch) {
    for (const SubNetwork& g : batch) {
      const auto loss = loss_and_gradient(model, spec, g, config.alpha, grad);
      bool finite = std::isfinite(loss.total);
      for (double v : grad.values) finite = finite && std::isfinite(v);
      if (!finite) throw NumericError("non-finite loss or gradient in epoch " + std::to_string(epoch));
      for (std::size_t t = 0; t < model.size(); ++t) {
        model.values[t] -= config.learning_rate * grad.values[t];
      }
    }
  }
  return model;
}

}  // namespace gen
