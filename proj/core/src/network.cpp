#include "fwips/network.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "fwips/rng.hpp"

namespace fwips {
namespace {

// Derivative of the activation at a node, from its cached output.
double activation_derivative(Activation activation, double out) {
  switch (activation) {
    case Activation::Sigmoid: return out * (1.0 - out);
    case Activation::Linear: return 1.0;
  }
  return 0.0;
}

void check_finite(const std::vector<double>& values, std::size_t layer) {
  for (double v : values) {
    if (!std::isfinite(v)) {
      throw std::runtime_error("forward: non-finite value in layer " +
                               std::to_string(layer));
    }
  }
}

}  // namespace

const char* to_string(Activation activation) {
  switch (activation) {
    case Activation::Sigmoid: return "sigmoid";
    case Activation::Linear: return "linear";
  }
  return "?";
}

Activation activation_from_string(const std::string& text) {
  if (text == "sigmoid") return Activation::Sigmoid;
  if (text == "linear") return Activation::Linear;
  throw std::invalid_argument("unknown activation '" + text + "'");
}

double sigmoid(double z) {
  // Numerically stable in both tails, clamped to the open interval so that
  // saturated nodes keep a nonzero derivative.
  double s;
  if (z >= 0.0) {
    s = 1.0 / (1.0 + std::exp(-z));
  } else {
    const double e = std::exp(z);
    s = e / (1.0 + e);
  }
  constexpr double lo = std::numeric_limits<double>::denorm_min();
  const double hi = 1.0 - std::numeric_limits<double>::epsilon() / 2.0;
  return std::min(std::max(s, lo), hi);
}

Network::Network(AffineNormalizer input_normalizer, std::vector<Layer> layers,
                 AffineNormalizer target_normalizer)
    : input_normalizer_(std::move(input_normalizer)),
      layers_(std::move(layers)),
      target_normalizer_(std::move(target_normalizer)) {
  if (layers_.empty()) {
    throw std::invalid_argument("network: needs at least one layer");
  }
  for (std::size_t m = 0; m + 1 < layers_.size(); ++m) {
    if (layers_[m].fan_out() != layers_[m + 1].fan_in()) {
      throw std::invalid_argument("network: layer widths do not chain at layer " +
                                  std::to_string(m));
    }
  }
  for (const Layer& layer : layers_) {
    if (layer.fan_in() == 0 || layer.fan_out() == 0) {
      throw std::invalid_argument("network: zero-width layer");
    }
    if (layer.biases.size() != layer.fan_out()) {
      throw std::invalid_argument("network: bias length does not match width");
    }
  }
}

std::size_t Network::parameter_count() const {
  std::size_t count = 0;
  for (const Layer& layer : layers_) {
    count += layer.weights.data.size() + layer.biases.size();
  }
  return count;
}

std::vector<double> Network::forward_normalized(
    const std::vector<double>& x_norm, Trace* trace) const {
  if (x_norm.size() != in_dim()) {
    throw std::invalid_argument("forward: input length does not match in_dim");
  }
  if (trace != nullptr) {
    trace->pre.assign(layers_.size(), {});
    trace->post.assign(layers_.size() + 1, {});
    trace->post[0] = x_norm;
  }
  std::vector<double> current = x_norm;
  for (std::size_t m = 0; m < layers_.size(); ++m) {
    const Layer& layer = layers_[m];
    std::vector<double> pre(layer.fan_out());
    for (std::size_t j = 0; j < layer.fan_out(); ++j) {
      double z = layer.biases[j];
      for (std::size_t i = 0; i < layer.fan_in(); ++i) {
        z += layer.weights(i, j) * current[i];
      }
      pre[j] = z;
    }
    std::vector<double> post(pre.size());
    for (std::size_t j = 0; j < pre.size(); ++j) {
      post[j] = layer.activation == Activation::Sigmoid ? sigmoid(pre[j]) : pre[j];
    }
    check_finite(post, m);
    if (trace != nullptr) {
      trace->pre[m] = std::move(pre);
      trace->post[m + 1] = post;
    }
    current = std::move(post);
  }
  return current;
}

std::vector<double> Network::forward(const std::vector<double>& x) const {
  return target_normalizer_.inverse(
      forward_normalized(input_normalizer_.forward(x)));
}

double Network::sample_loss(const std::vector<double>& x,
                            const std::vector<double>& target) const {
  const std::vector<double> y = forward_normalized(input_normalizer_.forward(x));
  const std::vector<double> t = target_normalizer_.forward(target);
  if (t.size() != y.size()) {
    throw std::invalid_argument("loss: target length does not match out_dim");
  }
  double loss = 0.0;
  for (std::size_t j = 0; j < y.size(); ++j) {
    const double d = t[j] - y[j];
    loss += d * d;
  }
  return loss;
}

Gradients Network::backward(const std::vector<double>& x,
                            const std::vector<double>& target) const {
  Trace trace;
  const std::vector<double> y =
      forward_normalized(input_normalizer_.forward(x), &trace);
  const std::vector<double> t = target_normalizer_.forward(target);
  if (t.size() != y.size()) {
    throw std::invalid_argument("backward: target length does not match out_dim");
  }

  const std::size_t last = layers_.size() - 1;

  // Output-layer sensitivity: -2 * diag(f') * (t - y).
  std::vector<double> sensitivity(y.size());
  for (std::size_t j = 0; j < y.size(); ++j) {
    const double deriv =
        activation_derivative(layers_[last].activation, trace.post[last + 1][j]);
    sensitivity[j] = -2.0 * deriv * (t[j] - y[j]);
  }

  Gradients grads;
  grads.weights.resize(layers_.size());
  grads.biases.resize(layers_.size());

  for (std::size_t m = last + 1; m-- > 0;) {
    const Layer& layer = layers_[m];
    Matrix dw(layer.fan_in(), layer.fan_out());
    for (std::size_t i = 0; i < layer.fan_in(); ++i) {
      const double in_i = trace.post[m][i];
      for (std::size_t j = 0; j < layer.fan_out(); ++j) {
        dw(i, j) = in_i * sensitivity[j];
      }
    }
    grads.weights[m] = std::move(dw);
    grads.biases[m] = sensitivity;

    if (m == 0) break;

    // Propagate through this layer's weights, then through the previous
    // layer's activation derivative.
    std::vector<double> previous(layer.fan_in(), 0.0);
    for (std::size_t i = 0; i < layer.fan_in(); ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < layer.fan_out(); ++j) {
        acc += layer.weights(i, j) * sensitivity[j];
      }
      const double deriv =
          activation_derivative(layers_[m - 1].activation, trace.post[m][i]);
      previous[i] = deriv * acc;
    }
    sensitivity = std::move(previous);
  }
  return grads;
}

Network init_network(std::size_t hidden_layers,
                     const std::vector<std::size_t>& hidden_widths,
                     std::size_t in_dim, std::size_t out_dim,
                     std::uint64_t seed, AffineNormalizer input_normalizer,
                     AffineNormalizer target_normalizer) {
  if (hidden_layers < 1) {
    throw std::invalid_argument("init_network: needs at least one hidden layer");
  }
  if (hidden_widths.size() != hidden_layers) {
    throw std::invalid_argument("init_network: width list does not match layer count");
  }
  if (in_dim == 0 || out_dim == 0) {
    throw std::invalid_argument("init_network: zero input/output dimension");
  }
  for (std::size_t w : hidden_widths) {
    if (w == 0) throw std::invalid_argument("init_network: zero hidden width");
  }

  Rng rng(seed);
  auto draw = [&rng] { return rng.uniform(-0.5, 0.5); };

  std::vector<Layer> layers;
  layers.reserve(hidden_layers + 1);
  std::size_t fan_in = in_dim;
  for (std::size_t m = 0; m <= hidden_layers; ++m) {
    const bool output = m == hidden_layers;
    const std::size_t fan_out = output ? out_dim : hidden_widths[m];
    Layer layer;
    layer.activation = output ? Activation::Linear : Activation::Sigmoid;
    layer.weights = Matrix(fan_in, fan_out);
    for (double& w : layer.weights.data) w = draw();
    layer.biases.resize(fan_out);
    for (double& b : layer.biases) b = draw();
    layers.push_back(std::move(layer));
    fan_in = fan_out;
  }
  return Network(std::move(input_normalizer), std::move(layers),
                 std::move(target_normalizer));
}

}  // namespace fwips
