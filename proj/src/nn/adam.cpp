#include "toolsel/nn/adam.hpp"

#include <cmath>
#include <string>

#include "toolsel/core/error.hpp"

namespace toolsel::nn {

namespace {

std::vector<std::size_t> block_sizes_of(const MlpHead& head) {
  std::vector<std::size_t> sizes;
  for (const auto& block : parameter_blocks(head)) sizes.push_back(block.size());
  return sizes;
}

}  // namespace

AdamState::AdamState(std::span<const std::size_t> block_sizes, AdamOptions options)
    : options_(options) {
  if (!(options.learning_rate > 0.0)) throw InvalidArgument("nn", "learning rate must be positive");
  if (!(options.beta1 > 0.0 && options.beta1 < 1.0) ||
      !(options.beta2 > 0.0 && options.beta2 < 1.0)) {
    throw InvalidArgument("nn", "Adam betas must lie in (0,1)");
  }
  if (!(options.epsilon > 0.0)) throw InvalidArgument("nn", "Adam epsilon must be positive");
  for (const std::size_t n : block_sizes) {
    m_.emplace_back(n, 0.0);
    v_.emplace_back(n, 0.0);
  }
}

AdamState::AdamState(const MlpHead& head, AdamOptions options)
    : AdamState(block_sizes_of(head), options) {}

void AdamState::step(std::span<const std::span<double>> params,
                     std::span<const std::span<const double>> grads) {
  if (params.size() != m_.size() || grads.size() != m_.size()) {
    throw InvalidArgument("nn", "Adam block count mismatch");
  }
  for (std::size_t b = 0; b < m_.size(); ++b) {
    if (params[b].size() != m_[b].size() || grads[b].size() != m_[b].size()) {
      throw InvalidArgument("nn", "Adam shape mismatch in block " + std::to_string(b));
    }
  }

  ++step_count_;
  const double t = static_cast<double>(step_count_);
  const double correction1 = 1.0 - std::pow(options_.beta1, t);
  const double correction2 = 1.0 - std::pow(options_.beta2, t);
  const double lr = options_.learning_rate;

  for (std::size_t b = 0; b < m_.size(); ++b) {
    std::vector<double>& m = m_[b];
    std::vector<double>& v = v_[b];
    const std::span<double> p = params[b];
    const std::span<const double> g = grads[b];
    for (std::size_t i = 0; i < m.size(); ++i) {
      m[i] = options_.beta1 * m[i] + (1.0 - options_.beta1) * g[i];
      v[i] = options_.beta2 * v[i] + (1.0 - options_.beta2) * g[i] * g[i];
      const double m_hat = m[i] / correction1;
      const double v_hat = v[i] / correction2;
      p[i] -= lr * m_hat / (std::sqrt(v_hat) + options_.epsilon);
    }
  }
}

void adam_update(MlpHead& head, const HeadGradients& grads, AdamState& state) {
  const auto params = parameter_blocks(head);
  const auto g = gradient_blocks(grads);
  state.step(params, g);
}

}  // namespace toolsel::nn
