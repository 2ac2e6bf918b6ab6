#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "toolsel/core/attributes.hpp"

namespace toolsel::nn {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline constexpr double kLayerNormEpsilon = 1e-5;

struct DenseLayer {
  Matrix weights;  // out_dim x in_dim
  Vector bias;     // out_dim
};

struct LayerNormParams {
  Vector gamma;
  Vector beta;
  double epsilon = kLayerNormEpsilon;
};

// Attribute-prediction head. Every hidden layer is followed by layer norm and
// ReLU; the output layer is a plain affine map onto the 13 attributes.
struct MlpHead {
  std::vector<std::size_t> layer_dims;  // [d_in, h_1, ..., h_k, 13]
  std::vector<DenseLayer> layers;       // layer_dims.size() - 1 entries
  std::vector<LayerNormParams> norms;   // one per hidden layer
  std::uint64_t rng_seed = 0;

  std::size_t input_dim() const { return layer_dims.front(); }
  std::size_t hidden_count() const { return norms.size(); }
  std::size_t parameter_count() const;
};

// Throws InvalidArgument unless dims has >= 2 positive entries ending in 13.
void validate_layer_dims(std::span<const std::size_t> dims);

// He-uniform weights (limit sqrt(6 / fan_in)), zero biases, gamma = 1,
// beta = 0. Deterministic in seed.
MlpHead init_head(std::vector<std::size_t> layer_dims, std::uint64_t seed);

// Population-variance layer norm.
Vector layer_norm_forward(const Vector& x, const LayerNormParams& p);

// Unclamped prediction for one embedding.
AttributeVector head_forward(const MlpHead& head, std::span<const double> x);

// Column-wise batch forward: inputs is d_in x B, result is 13 x B.
Matrix head_forward_batch(const MlpHead& head, const Matrix& inputs);

double mse_loss(std::span<const double> pred, std::span<const double> target);

// Mean over columns of per-sample MSE.
double batch_mse(const MlpHead& head, const Matrix& inputs, const Matrix& targets);

struct NormGradients {
  Vector gamma;
  Vector beta;
};

// Same shapes as the head's parameters.
struct HeadGradients {
  std::vector<DenseLayer> layers;
  std::vector<NormGradients> norms;
  double loss = 0.0;  // mean batch MSE at the evaluated parameters
};

// Analytic gradient of the mean batch MSE. inputs is d_in x B, targets 13 x B.
HeadGradients head_backward(const MlpHead& head, const Matrix& inputs, const Matrix& targets);

// Flat views over parameters in a fixed order: for each layer its weights then
// bias, followed by gamma and beta when the layer is hidden.
std::vector<std::span<double>> parameter_blocks(MlpHead& head);
std::vector<std::span<const double>> parameter_blocks(const MlpHead& head);
std::vector<std::span<const double>> gradient_blocks(const HeadGradients& grads);

}  // namespace toolsel::nn
