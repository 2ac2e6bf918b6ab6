#include "toolsel/nn/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "toolsel/core/error.hpp"

namespace toolsel::nn {

namespace {

// Finite differences are taken in extended precision: the loss is O(10)
// while individual gradients can be O(1e-7), so double-precision loss
// differences would be dominated by cancellation.
using Real = long double;

struct ExtLayer {
  std::size_t in = 0;
  std::size_t out = 0;
  std::vector<Real> weights;  // row-major
  std::vector<Real> bias;
  std::vector<Real> gamma;    // empty for the output layer
  std::vector<Real> beta;
  Real epsilon = 0;
};

std::vector<ExtLayer> widen(const MlpHead& head) {
  std::vector<ExtLayer> layers;
  for (std::size_t l = 0; l < head.layers.size(); ++l) {
    const DenseLayer& d = head.layers[l];
    ExtLayer e;
    e.in = static_cast<std::size_t>(d.weights.cols());
    e.out = static_cast<std::size_t>(d.weights.rows());
    for (std::size_t r = 0; r < e.out; ++r) {
      for (std::size_t c = 0; c < e.in; ++c) {
        e.weights.push_back(d.weights(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)));
      }
      e.bias.push_back(d.bias(static_cast<Eigen::Index>(r)));
    }
    if (l < head.norms.size()) {
      const LayerNormParams& n = head.norms[l];
      for (std::size_t r = 0; r < e.out; ++r) {
        e.gamma.push_back(n.gamma(static_cast<Eigen::Index>(r)));
        e.beta.push_back(n.beta(static_cast<Eigen::Index>(r)));
      }
      e.epsilon = n.epsilon;
    }
    layers.push_back(std::move(e));
  }
  return layers;
}

std::vector<Real> linear(const ExtLayer& layer, const std::vector<Real>& input) {
  std::vector<Real> z(layer.out);
  for (std::size_t r = 0; r < layer.out; ++r) {
    const Real* w = &layer.weights[r * layer.in];
    // Independent partial sums keep the x87 pipeline busy.
    Real acc[4] = {0, 0, 0, 0};
    std::size_t c = 0;
    for (; c + 4 <= layer.in; c += 4) {
      acc[0] += w[c] * input[c];
      acc[1] += w[c + 1] * input[c + 1];
      acc[2] += w[c + 2] * input[c + 2];
      acc[3] += w[c + 3] * input[c + 3];
    }
    for (; c < layer.in; ++c) acc[0] += w[c] * input[c];
    z[r] = layer.bias[r] + ((acc[0] + acc[1]) + (acc[2] + acc[3]));
  }
  return z;
}

// Norm and ReLU for hidden layers; identity for the output layer.
std::vector<Real> finish(const ExtLayer& layer, std::vector<Real> z) {
  if (layer.gamma.empty()) return z;
  Real mean = 0;
  for (const Real v : z) mean += v;
  mean /= static_cast<Real>(z.size());
  Real var = 0;
  for (const Real v : z) var += (v - mean) * (v - mean);
  var /= static_cast<Real>(z.size());
  const Real inv_std = 1 / std::sqrt(var + layer.epsilon);
  for (std::size_t r = 0; r < z.size(); ++r) {
    const Real n = layer.gamma[r] * (z[r] - mean) * inv_std + layer.beta[r];
    z[r] = n > 0 ? n : 0;
  }
  return z;
}

struct SampleCache {
  std::vector<std::vector<Real>> inputs;  // input to layer l
  std::vector<std::vector<Real>> linear;  // pre-norm z of layer l
};

// Loss over all samples when layer `first` has pre-norm output z(s).
template <typename ZFn>
Real loss_from(const std::vector<ExtLayer>& layers, const std::vector<SampleCache>& cache,
               std::size_t first, const Matrix& targets, ZFn&& z_of) {
  Real total = 0;
  for (std::size_t s = 0; s < cache.size(); ++s) {
    std::vector<Real> h = finish(layers[first], z_of(s));
    for (std::size_t l = first + 1; l < layers.size(); ++l) h = finish(layers[l], linear(layers[l], h));
    Real sq = 0;
    for (std::size_t i = 0; i < h.size(); ++i) {
      const Real d = h[i] - targets(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(s));
      sq += d * d;
    }
    total += sq / static_cast<Real>(h.size());
  }
  return total / static_cast<Real>(cache.size());
}

}  // namespace

GradcheckResult gradcheck(const MlpHead& head, const Matrix& inputs, const Matrix& targets,
                          double perturbation) {
  if (!(perturbation >= 1e-6 && perturbation <= 1e-3)) {
    throw InvalidArgument("nn", "gradcheck perturbation must lie in [1e-6, 1e-3]");
  }
  const HeadGradients analytic = head_backward(head, inputs, targets);
  const auto grad_blocks = gradient_blocks(analytic);

  std::vector<ExtLayer> layers = widen(head);
  std::vector<SampleCache> cache(static_cast<std::size_t>(inputs.cols()));
  for (std::size_t s = 0; s < cache.size(); ++s) {
    std::vector<Real> h(static_cast<std::size_t>(inputs.rows()));
    for (std::size_t i = 0; i < h.size(); ++i) {
      h[i] = inputs(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(s));
    }
    for (std::size_t l = 0; l < layers.size(); ++l) {
      cache[s].inputs.push_back(h);
      cache[s].linear.push_back(linear(layers[l], h));
      if (l + 1 < layers.size()) h = finish(layers[l], cache[s].linear.back());
    }
  }

  GradcheckResult result;
  const Real step = perturbation;
  std::size_t block = 0;
  auto record = [&](Real plus, Real minus, std::size_t i) {
    if (!std::isfinite(plus) || !std::isfinite(minus)) {
      throw NumericError("nn", "non-finite loss during gradcheck");
    }
    const auto numeric = static_cast<double>((plus - minus) / (2 * step));
    const double a = grad_blocks[block][i];
    const double denom = std::max({std::abs(a), std::abs(numeric), 1e-8});
    const double err = std::abs(a - numeric) / denom;
    if (err > result.max_relative_error) {
      result.max_relative_error = err;
      result.worst_block = block;
      result.worst_index = i;
    }
    ++result.parameters_checked;
  };
  // Loss with row r of layer l's pre-norm output shifted by delta(s).
  auto shifted = [&](std::size_t l, std::size_t r, auto&& delta) {
    return loss_from(layers, cache, l, targets, [&](std::size_t s) {
      std::vector<Real> z = cache[s].linear[l];
      z[r] += delta(s);
      return z;
    });
  };

  // Same order as parameter_blocks; Eigen stores weights column-major.
  for (std::size_t l = 0; l < layers.size(); ++l) {
    ExtLayer& layer = layers[l];
    for (std::size_t c = 0; c < layer.in; ++c) {
      for (std::size_t r = 0; r < layer.out; ++r) {
        const Real plus = shifted(l, r, [&](std::size_t s) { return step * cache[s].inputs[l][c]; });
        const Real minus = shifted(l, r, [&](std::size_t s) { return -step * cache[s].inputs[l][c]; });
        record(plus, minus, c * layer.out + r);
      }
    }
    ++block;
    for (std::size_t r = 0; r < layer.out; ++r) {
      const Real plus = shifted(l, r, [&](std::size_t) { return step; });
      const Real minus = shifted(l, r, [&](std::size_t) { return -step; });
      record(plus, minus, r);
    }
    ++block;
    if (layer.gamma.empty()) continue;
    auto unshifted = [&](std::size_t s) { return cache[s].linear[l]; };
    for (std::vector<Real>* values : {&layer.gamma, &layer.beta}) {
      for (std::size_t r = 0; r < values->size(); ++r) {
        const Real saved = (*values)[r];
        (*values)[r] = saved + step;
        const Real plus = loss_from(layers, cache, l, targets, unshifted);
        (*values)[r] = saved - step;
        const Real minus = loss_from(layers, cache, l, targets, unshifted);
        (*values)[r] = saved;
        record(plus, minus, r);
      }
      ++block;
    }
  }
  return result;
}

}  // namespace toolsel::nn
