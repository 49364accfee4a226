#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "epilag/errors.hpp"
#include "epilag/matrix.hpp"
#include "epilag/rng.hpp"
#include "epilag/standardize.hpp"

namespace epilag {

enum class Activation { relu, linear };

struct MlpSpec {
  std::vector<std::size_t> layer_widths = {100, 50, 10, 1};
  std::vector<Activation> activations = {Activation::relu, Activation::relu, Activation::relu,
                                         Activation::linear};
  std::size_t epochs = 200;
  std::size_t batch_size = 32;
  double learning_rate = 1e-3;
  std::uint64_t seed = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Trainable parameters of the dense stack: (in+1)·out per layer.
inline std::size_t mlp_param_count(std::size_t input_dim, const MlpSpec& spec) {
  std::size_t count = 0;
  std::size_t fan_in = input_dim;
  for (std::size_t w : spec.layer_widths) {
    count += fan_in * w + w;
    fan_in = w;
  }
  return count;
}

/// Fully connected regression network trained by mini-batch gradient descent
/// with the Adam update rule on a mean-squared-error loss. Initialization and
/// epoch shuffling draw from streams derived from spec.seed, so training is
/// reproducible bit for bit.
class Mlp {
 public:
  Mlp() = default;

  Mlp(std::size_t input_dim, const MlpSpec& spec) : spec_(spec), input_dim_(input_dim) {
    Rng rng(derive_seed(spec.seed, "mlp.init"));
    std::size_t fan_in = input_dim;
    for (std::size_t l = 0; l < spec.layer_widths.size(); ++l) {
      Layer layer;
      layer.in = fan_in;
      layer.out = spec.layer_widths[l];
      layer.act = l < spec.activations.size() ? spec.activations[l] : Activation::linear;
      layer.weights.resize(layer.in * layer.out);
      layer.biases.assign(layer.out, 0.0);
      double limit = std::sqrt(6.0 / static_cast<double>(fan_in));
      for (auto& w : layer.weights) w = rng.uniform(-limit, limit);
      fan_in = layer.out;
      layers_.push_back(std::move(layer));
    }
  }

  std::size_t input_dim() const { return input_dim_; }
  const MlpSpec& spec() const { return spec_; }

  std::size_t param_count() const { return mlp_param_count(input_dim_, spec_); }

  std::vector<double> parameters() const {
    std::vector<double> flat;
    flat.reserve(param_count());
    for (const auto& layer : layers_) {
      flat.insert(flat.end(), layer.weights.begin(), layer.weights.end());
      flat.insert(flat.end(), layer.biases.begin(), layer.biases.end());
    }
    return flat;
  }

  void set_parameters(const std::vector<double>& flat) {
    std::size_t pos = 0;
    for (auto& layer : layers_) {
      for (auto& w : layer.weights) w = flat[pos++];
      for (auto& b : layer.biases) b = flat[pos++];
    }
  }

  double predict_row(std::span<const double> row) const {
    std::vector<double> a(row.begin(), row.end());
    std::vector<double> next;
    for (std::size_t l = 0; l < layers_.size(); ++l) {
      forward_layer(l, a, next);
      std::swap(a, next);
    }
    return a[0];
  }

  TargetVector predict(const FeatureMatrix& x) const {
    if (x.cols != input_dim_) throw DimensionMismatch(x.cols, input_dim_);
    TargetVector out(x.rows);
    for (std::size_t r = 0; r < x.rows; ++r) out[r] = predict_row(x.row(r));
    return out;
  }

  /// Mean squared error over the batch.
  double loss(const FeatureMatrix& x, const TargetVector& y) const {
    double s = 0.0;
    for (std::size_t r = 0; r < x.rows; ++r) {
      double d = predict_row(x.row(r)) - y[r];
      s += d * d;
    }
    return s / static_cast<double>(x.rows);
  }

  /// Analytic dLoss/dparam for the whole batch, in parameters() layout.
  std::vector<double> gradients(const FeatureMatrix& x, const TargetVector& y) const {
    double unused = 0.0;
    return loss_and_gradients(x, y, unused);
  }

  /// Backpropagation through the dense stack; also reports the batch loss so
  /// training does not pay for a second forward pass.
  std::vector<double> loss_and_gradients(const FeatureMatrix& x, const TargetVector& y,
                                         double& loss_out) const {
    const std::size_t batch = x.rows;
    std::vector<std::vector<double>> grad_w(layers_.size());
    std::vector<std::vector<double>> grad_b(layers_.size());
    for (std::size_t l = 0; l < layers_.size(); ++l) {
      grad_w[l].assign(layers_[l].weights.size(), 0.0);
      grad_b[l].assign(layers_[l].biases.size(), 0.0);
    }

    double total_loss = 0.0;
    std::vector<std::vector<double>> activations(layers_.size() + 1);
    std::vector<std::vector<double>> preacts(layers_.size());
    for (std::size_t r = 0; r < batch; ++r) {
      auto row = x.row(r);
      activations[0].assign(row.begin(), row.end());
      for (std::size_t l = 0; l < layers_.size(); ++l) {
        const Layer& layer = layers_[l];
        auto& z = preacts[l];
        z.assign(layer.out, 0.0);
        for (std::size_t o = 0; o < layer.out; ++o) {
          double acc = layer.biases[o];
          const double* w = layer.weights.data() + o * layer.in;
          for (std::size_t i = 0; i < layer.in; ++i) acc += w[i] * activations[l][i];
          z[o] = acc;
        }
        auto& a = activations[l + 1];
        a.resize(layer.out);
        for (std::size_t o = 0; o < layer.out; ++o)
          a[o] = layer.act == Activation::relu ? (z[o] > 0.0 ? z[o] : 0.0) : z[o];
      }

      double err = activations.back()[0] - y[r];
      total_loss += err * err;

      // delta = dLoss/dz, starting from d/dpred of mean squared error
      std::vector<double> delta{2.0 * err / static_cast<double>(batch)};
      for (std::size_t li = layers_.size(); li-- > 0;) {
        const Layer& layer = layers_[li];
        if (layer.act == Activation::relu) {
          for (std::size_t o = 0; o < layer.out; ++o)
            if (preacts[li][o] <= 0.0) delta[o] = 0.0;
        }
        for (std::size_t o = 0; o < layer.out; ++o) {
          grad_b[li][o] += delta[o];
          double* gw = grad_w[li].data() + o * layer.in;
          for (std::size_t i = 0; i < layer.in; ++i) gw[i] += delta[o] * activations[li][i];
        }
        if (li == 0) break;
        std::vector<double> prev_delta(layer.in, 0.0);
        for (std::size_t o = 0; o < layer.out; ++o) {
          const double* w = layer.weights.data() + o * layer.in;
          for (std::size_t i = 0; i < layer.in; ++i) prev_delta[i] += w[i] * delta[o];
        }
        delta = std::move(prev_delta);
      }
    }
    loss_out = total_loss / static_cast<double>(batch);

    std::vector<double> flat;
    flat.reserve(param_count());
    for (std::size_t l = 0; l < layers_.size(); ++l) {
      flat.insert(flat.end(), grad_w[l].begin(), grad_w[l].end());
      flat.insert(flat.end(), grad_b[l].begin(), grad_b[l].end());
    }
    return flat;
  }

  /// Adam over shuffled mini-batches; the last short batch is kept. Throws
  /// NonFiniteLoss as soon as a batch loss stops being finite.
  void train(const FeatureMatrix& x, const TargetVector& y) {
    if (x.rows != y.size()) throw LengthMismatch(x.rows, y.size());
    if (x.rows < spec_.batch_size) throw TooFewSamples(x.rows, spec_.batch_size);

    std::vector<double> params = parameters();
    std::vector<double> m(params.size(), 0.0), v(params.size(), 0.0);
    std::size_t step = 0;

    std::vector<std::size_t> order(x.rows);
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    for (std::size_t epoch = 0; epoch < spec_.epochs; ++epoch) {
      Rng shuffle_rng(derive_seed(spec_.seed, "mlp.shuffle", epoch));
      shuffle_rng.shuffle(order);
      for (std::size_t start = 0; start < x.rows; start += spec_.batch_size) {
        std::size_t end = std::min(start + spec_.batch_size, x.rows);
        FeatureMatrix batch = FeatureMatrix::zeros(end - start, x.cols);
        TargetVector batch_y(end - start);
        for (std::size_t r = start; r < end; ++r) {
          auto row = x.row(order[r]);
          std::copy(row.begin(), row.end(), batch.values.begin() + (r - start) * x.cols);
          batch_y[r - start] = y[order[r]];
        }
        double batch_loss = 0.0;
        std::vector<double> grad = loss_and_gradients(batch, batch_y, batch_loss);
        if (!std::isfinite(batch_loss))
          throw NonFiniteLoss("epoch " + std::to_string(epoch) + ", batch at sample " +
                              std::to_string(start) + ", loss " + std::to_string(batch_loss));
        ++step;
        double bias1 = 1.0 - std::pow(spec_.beta1, static_cast<double>(step));
        double bias2 = 1.0 - std::pow(spec_.beta2, static_cast<double>(step));
        for (std::size_t p = 0; p < params.size(); ++p) {
          m[p] = spec_.beta1 * m[p] + (1.0 - spec_.beta1) * grad[p];
          v[p] = spec_.beta2 * v[p] + (1.0 - spec_.beta2) * grad[p] * grad[p];
          double m_hat = m[p] / bias1;
          double v_hat = v[p] / bias2;
          params[p] -= spec_.learning_rate * m_hat / (std::sqrt(v_hat) + spec_.epsilon);
        }
        set_parameters(params);
      }
    }
  }

 private:
  struct Layer {
    std::size_t in = 0;
    std::size_t out = 0;
    Activation act = Activation::linear;
    std::vector<double> weights;  // out x in, row-major
    std::vector<double> biases;
  };

  void forward_layer(std::size_t l, const std::vector<double>& in,
                     std::vector<double>& out) const {
    const Layer& layer = layers_[l];
    out.assign(layer.out, 0.0);
    for (std::size_t o = 0; o < layer.out; ++o) {
      double acc = layer.biases[o];
      const double* w = layer.weights.data() + o * layer.in;
      for (std::size_t i = 0; i < layer.in; ++i) acc += w[i] * in[i];
      out[o] = layer.act == Activation::relu ? (acc > 0.0 ? acc : 0.0) : acc;
    }
  }

  MlpSpec spec_;
  std::size_t input_dim_ = 0;
  std::vector<Layer> layers_;
};

/// Trained MLP plus the standardization fitted on its training features;
/// prediction re-applies the stored standardization automatically.
struct MlpModel {
  MlpSpec spec;
  Standardizer scaler;
  Mlp net;

  TargetVector predict(const FeatureMatrix& x) const {
    if (x.cols != net.input_dim()) throw DimensionMismatch(x.cols, net.input_dim());
    return net.predict(scaler.transform(x));
  }
};

/// Standardize the training features, then train the network on them.
inline MlpModel fit_mlp(const FeatureMatrix& x, const TargetVector& y, const MlpSpec& spec) {
  MlpModel model;
  model.spec = spec;
  model.scaler = Standardizer::fit(x);
  model.net = Mlp(x.cols, spec);
  FeatureMatrix xs = model.scaler.transform(x);
  model.net.train(xs, y);
  return model;
}

}  // namespace epilag
