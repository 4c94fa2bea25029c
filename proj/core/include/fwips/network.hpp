#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "fwips/normalizer.hpp"

namespace fwips {

enum class Activation { Sigmoid, Linear };

const char* to_string(Activation activation);
Activation activation_from_string(const std::string& text);

// Dense row-major matrix, just large enough for layer parameters.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  const double& operator()(std::size_t i, std::size_t j) const {
    return data[i * cols + j];
  }

  bool operator==(const Matrix&) const = default;
};

// One fully connected layer. weights(i, j) connects input i to node j, so the
// forward map is y_in = W^T x + b followed by the activation.
struct Layer {
  Matrix weights;               // fan_in x fan_out
  std::vector<double> biases;   // fan_out
  Activation activation = Activation::Sigmoid;

  std::size_t fan_in() const { return weights.rows; }
  std::size_t fan_out() const { return weights.cols; }

  bool operator==(const Layer&) const = default;
};

// Gradients of the squared error w.r.t. every weight and bias, shaped like
// the layer stack they were taken from.
struct Gradients {
  std::vector<Matrix> weights;
  std::vector<std::vector<double>> biases;
};

// Feedforward network. The trainable stack normally consists of sigmoid
// hidden layers and one linear output layer; the input layer is realized as
// the fixed affine normalizer, it carries no trainable parameters. Raw
// outputs live in normalized target space and are mapped back to physical
// units through the target normalizer's inverse.
class Network {
 public:
  Network() = default;
  Network(AffineNormalizer input_normalizer, std::vector<Layer> layers,
          AffineNormalizer target_normalizer);

  std::size_t in_dim() const { return layers_.front().fan_in(); }
  std::size_t out_dim() const { return layers_.back().fan_out(); }
  std::size_t layer_count() const { return layers_.size(); }
  std::size_t hidden_layer_count() const { return layers_.size() - 1; }
  std::size_t parameter_count() const;

  const std::vector<Layer>& layers() const { return layers_; }
  std::vector<Layer>& layers() { return layers_; }
  const AffineNormalizer& input_normalizer() const { return input_normalizer_; }
  const AffineNormalizer& target_normalizer() const { return target_normalizer_; }

  // Full inference: input normalization, layer composition, output
  // denormalization. Throws std::runtime_error if an intermediate value is
  // not finite.
  std::vector<double> forward(const std::vector<double>& x) const;

  // Pre-activations and activations of every layer; post[0] is the normalized
  // input, post[m] the output of layer m-1.
  struct Trace {
    std::vector<std::vector<double>> pre;
    std::vector<std::vector<double>> post;
  };

  // Layer composition in normalized space (no input/output denormalization).
  std::vector<double> forward_normalized(const std::vector<double>& x_norm,
                                         Trace* trace = nullptr) const;

  // Squared error delta^T delta in normalized target space for one sample;
  // the quantity whose gradients backward() returns.
  double sample_loss(const std::vector<double>& x,
                     const std::vector<double>& target) const;

  // Gradients of sample_loss w.r.t. every weight and bias, by
  // backpropagation of per-layer sensitivities.
  Gradients backward(const std::vector<double>& x,
                     const std::vector<double>& target) const;

  bool operator==(const Network&) const = default;

 private:
  AffineNormalizer input_normalizer_;
  std::vector<Layer> layers_;
  AffineNormalizer target_normalizer_;
};

// Builds a network with `hidden_layers` sigmoid layers of the given widths
// and a linear output layer. Weights and biases are drawn i.i.d. uniform on
// [-0.5, 0.5] from the seeded generator; identical seeds give bit-identical
// networks.
Network init_network(std::size_t hidden_layers,
                     const std::vector<std::size_t>& hidden_widths,
                     std::size_t in_dim, std::size_t out_dim,
                     std::uint64_t seed,
                     AffineNormalizer input_normalizer = {},
                     AffineNormalizer target_normalizer = {});

double sigmoid(double z);

}  // namespace fwips
