#include "toolsel/nn/dense.hpp"

#include <cmath>
#include <string>

#include "toolsel/core/error.hpp"
#include "toolsel/core/random.hpp"

namespace toolsel::nn {

namespace {

struct HiddenCache {
  Matrix xhat;              // normalized pre-activations, before gamma/beta
  Eigen::RowVectorXd inv_std;
  Matrix pre_relu;          // gamma * xhat + beta
};

struct ForwardCache {
  std::vector<Matrix> activations;  // activations[0] = inputs
  std::vector<HiddenCache> hidden;
  Matrix output;
};

void require_finite(const Matrix& m, const char* what, std::size_t layer) {
  if (!m.allFinite()) {
    throw NumericError("nn", std::string("non-finite ") + what + " at layer " +
                                 std::to_string(layer));
  }
}

ForwardCache forward_cached(const MlpHead& head, const Matrix& inputs) {
  if (static_cast<std::size_t>(inputs.rows()) != head.input_dim()) {
    throw InvalidArgument("nn", "input dimension " + std::to_string(inputs.rows()) +
                                    " does not match head input " +
                                    std::to_string(head.input_dim()));
  }
  ForwardCache cache;
  cache.activations.reserve(head.layers.size());
  cache.activations.push_back(inputs);
  for (std::size_t l = 0; l < head.hidden_count(); ++l) {
    const DenseLayer& layer = head.layers[l];
    const LayerNormParams& norm = head.norms[l];
    Matrix z = layer.weights * cache.activations.back();
    z.colwise() += layer.bias;

    HiddenCache hc;
    const Eigen::RowVectorXd mean = z.colwise().mean();
    Matrix centered = z.rowwise() - mean;
    const Eigen::RowVectorXd var = centered.array().square().colwise().mean();
    hc.inv_std = (var.array() + norm.epsilon).rsqrt();
    hc.xhat = (centered.array().rowwise() * hc.inv_std.array()).matrix();
    hc.pre_relu = ((hc.xhat.array().colwise() * norm.gamma.array()).colwise() +
                   norm.beta.array()).matrix();
    require_finite(hc.pre_relu, "activation", l);
    cache.activations.push_back(hc.pre_relu.cwiseMax(0.0));
    cache.hidden.push_back(std::move(hc));
  }
  const DenseLayer& last = head.layers.back();
  cache.output = last.weights * cache.activations.back();
  cache.output.colwise() += last.bias;
  require_finite(cache.output, "output", head.layers.size() - 1);
  return cache;
}

}  // namespace

std::size_t MlpHead::parameter_count() const {
  std::size_t n = 0;
  for (const auto& layer : layers) n += layer.weights.size() + layer.bias.size();
  for (const auto& norm : norms) n += norm.gamma.size() + norm.beta.size();
  return n;
}

void validate_layer_dims(std::span<const std::size_t> dims) {
  if (dims.size() < 2) throw InvalidArgument("nn", "layer_dims needs at least 2 entries");
  if (dims.back() != kAttributeCount) {
    throw InvalidArgument("nn", "last layer dimension must be 13, got " +
                                    std::to_string(dims.back()));
  }
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (dims[i] == 0) {
      throw InvalidArgument("nn", "layer_dims[" + std::to_string(i) + "] must be positive");
    }
  }
}

MlpHead init_head(std::vector<std::size_t> layer_dims, std::uint64_t seed) {
  validate_layer_dims(layer_dims);
  MlpHead head;
  head.layer_dims = std::move(layer_dims);
  head.rng_seed = seed;

  Rng rng(seed, streams::init);
  const std::size_t n_layers = head.layer_dims.size() - 1;
  for (std::size_t l = 0; l < n_layers; ++l) {
    const auto in = static_cast<Eigen::Index>(head.layer_dims[l]);
    const auto out = static_cast<Eigen::Index>(head.layer_dims[l + 1]);
    const double limit = std::sqrt(6.0 / static_cast<double>(in));
    DenseLayer layer{Matrix(out, in), Vector::Zero(out)};
    // Row-major draw order so the stream maps onto the serialized layout.
    for (Eigen::Index r = 0; r < out; ++r) {
      for (Eigen::Index c = 0; c < in; ++c) layer.weights(r, c) = rng.uniform(-limit, limit);
    }
    head.layers.push_back(std::move(layer));
    if (l + 1 < n_layers) {
      head.norms.push_back({Vector::Ones(out), Vector::Zero(out), kLayerNormEpsilon});
    }
  }
  return head;
}

Vector layer_norm_forward(const Vector& x, const LayerNormParams& p) {
  if (x.size() != p.gamma.size() || x.size() != p.beta.size()) {
    throw InvalidArgument("nn", "layer norm dimension mismatch: input " +
                                    std::to_string(x.size()) + ", params " +
                                    std::to_string(p.gamma.size()));
  }
  if (x.size() == 0) throw InvalidArgument("nn", "layer norm on empty vector");
  const double mean = x.mean();
  const Vector centered = x.array() - mean;
  const double var = centered.squaredNorm() / static_cast<double>(x.size());
  const double inv_std = 1.0 / std::sqrt(var + p.epsilon);
  return (p.gamma.array() * centered.array() * inv_std + p.beta.array()).matrix();
}

AttributeVector head_forward(const MlpHead& head, std::span<const double> x) {
  if (x.size() != head.input_dim()) {
    throw InvalidArgument("nn", "input dimension " + std::to_string(x.size()) +
                                    " does not match head input " +
                                    std::to_string(head.input_dim()));
  }
  Vector h = Eigen::Map<const Vector>(x.data(), static_cast<Eigen::Index>(x.size()));
  for (std::size_t l = 0; l < head.hidden_count(); ++l) {
    Vector z = head.layers[l].weights * h + head.layers[l].bias;
    Vector n = layer_norm_forward(z, head.norms[l]);
    if (!n.allFinite()) {
      throw NumericError("nn", "non-finite activation at layer " + std::to_string(l));
    }
    h = n.cwiseMax(0.0);
  }
  const Vector y = head.layers.back().weights * h + head.layers.back().bias;
  if (!y.allFinite()) {
    throw NumericError("nn", "non-finite output at layer " + std::to_string(head.layers.size() - 1));
  }
  AttributeVector out{};
  for (std::size_t i = 0; i < kAttributeCount; ++i) out[i] = y(static_cast<Eigen::Index>(i));
  return out;
}

Matrix head_forward_batch(const MlpHead& head, const Matrix& inputs) {
  return forward_cached(head, inputs).output;
}

double mse_loss(std::span<const double> pred, std::span<const double> target) {
  if (pred.size() != kAttributeCount || target.size() != kAttributeCount) {
    throw InvalidArgument("nn", "mse_loss expects two 13-vectors, got " +
                                    std::to_string(pred.size()) + " and " +
                                    std::to_string(target.size()));
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < kAttributeCount; ++i) {
    const double d = pred[i] - target[i];
    sum += d * d;
  }
  return sum / static_cast<double>(kAttributeCount);
}

double batch_mse(const MlpHead& head, const Matrix& inputs, const Matrix& targets) {
  const Matrix out = head_forward_batch(head, inputs);
  if (out.rows() != targets.rows() || out.cols() != targets.cols()) {
    throw InvalidArgument("nn", "target batch shape mismatch");
  }
  return (out - targets).squaredNorm() / static_cast<double>(out.size());
}

HeadGradients head_backward(const MlpHead& head, const Matrix& inputs, const Matrix& targets) {
  if (inputs.cols() == 0) throw InvalidArgument("nn", "empty batch");
  if (targets.rows() != static_cast<Eigen::Index>(kAttributeCount) ||
      targets.cols() != inputs.cols()) {
    throw InvalidArgument("nn", "targets must be 13 x batch");
  }
  const ForwardCache cache = forward_cached(head, inputs);
  const auto batch = static_cast<double>(inputs.cols());

  HeadGradients grads;
  grads.layers.resize(head.layers.size());
  grads.norms.resize(head.hidden_count());

  const Matrix residual = cache.output - targets;
  grads.loss = residual.squaredNorm() / static_cast<double>(residual.size());
  if (!std::isfinite(grads.loss)) throw NumericError("nn", "non-finite loss");

  // d(mean over batch of mean over 13 of r^2) / d output
  Matrix delta = residual * (2.0 / (static_cast<double>(kAttributeCount) * batch));

  for (std::size_t l = head.layers.size(); l-- > 0;) {
    const Matrix& input = cache.activations[l];
    grads.layers[l].weights = delta * input.transpose();
    grads.layers[l].bias = delta.rowwise().sum();
    if (l == 0) break;

    Matrix d_act = head.layers[l].weights.transpose() * delta;
    const HiddenCache& hc = cache.hidden[l - 1];
    const LayerNormParams& norm = head.norms[l - 1];

    // ReLU, subgradient 0 at 0
    const Matrix d_pre = (hc.pre_relu.array() > 0.0).select(d_act.array(), 0.0).matrix();
    grads.norms[l - 1].gamma = (d_pre.array() * hc.xhat.array()).rowwise().sum().matrix();
    grads.norms[l - 1].beta = d_pre.rowwise().sum();

    const Matrix d_xhat = (d_pre.array().colwise() * norm.gamma.array()).matrix();
    const Eigen::RowVectorXd mean_d = d_xhat.colwise().mean();
    const Eigen::RowVectorXd mean_dx = (d_xhat.array() * hc.xhat.array()).colwise().mean();
    Matrix d_z = d_xhat.rowwise() - mean_d;
    d_z -= (hc.xhat.array().rowwise() * mean_dx.array()).matrix();
    delta = (d_z.array().rowwise() * hc.inv_std.array()).matrix();
  }

  for (std::size_t l = 0; l < grads.layers.size(); ++l) {
    require_finite(grads.layers[l].weights, "gradient", l);
  }
  return grads;
}

std::vector<std::span<double>> parameter_blocks(MlpHead& head) {
  std::vector<std::span<double>> blocks;
  for (std::size_t l = 0; l < head.layers.size(); ++l) {
    auto& layer = head.layers[l];
    blocks.emplace_back(layer.weights.data(), static_cast<std::size_t>(layer.weights.size()));
    blocks.emplace_back(layer.bias.data(), static_cast<std::size_t>(layer.bias.size()));
    if (l < head.norms.size()) {
      auto& norm = head.norms[l];
      blocks.emplace_back(norm.gamma.data(), static_cast<std::size_t>(norm.gamma.size()));
      blocks.emplace_back(norm.beta.data(), static_cast<std::size_t>(norm.beta.size()));
    }
  }
  return blocks;
}

std::vector<std::span<const double>> parameter_blocks(const MlpHead& head) {
  auto mutable_blocks = parameter_blocks(const_cast<MlpHead&>(head));
  return {mutable_blocks.begin(), mutable_blocks.end()};
}

std::vector<std::span<const double>> gradient_blocks(const HeadGradients& grads) {
  std::vector<std::span<const double>> blocks;
  for (std::size_t l = 0; l < grads.layers.size(); ++l) {
    const auto& layer = grads.layers[l];
    blocks.emplace_back(layer.weights.data(), static_cast<std::size_t>(layer.weights.size()));
    blocks.emplace_back(layer.bias.data(), static_cast<std::size_t>(layer.bias.size()));
    if (l < grads.norms.size()) {
      const auto& norm = grads.norms[l];
      blocks.emplace_back(norm.gamma.data(), static_cast<std::size_t>(norm.gamma.size()));
      blocks.emplace_back(norm.beta.data(), static_cast<std::size_t>(norm.beta.size()));
    }
  }
  return blocks;
}

}  // namespace toolsel::nn
