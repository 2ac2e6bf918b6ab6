#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "toolsel/nn/dense.hpp"

namespace toolsel::nn {

struct AdamOptions {
  double learning_rate = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// Moment estimates mirror the parameter blocks they were built from.
class AdamState {
 public:
  AdamState(std::span<const std::size_t> block_sizes, AdamOptions options);
  AdamState(const MlpHead& head, AdamOptions options);

  const AdamOptions& options() const { return options_; }
  std::uint64_t step_count() const { return step_count_; }
  const std::vector<std::vector<double>>& first_moment() const { return m_; }
  const std::vector<std::vector<double>>& second_moment() const { return v_; }

  // Bias-corrected Adam step over matching parameter/gradient blocks.
  void step(std::span<const std::span<double>> params,
            std::span<const std::span<const double>> grads);

 private:
  AdamOptions options_;
  std::uint64_t step_count_ = 0;
  std::vector<std::vector<double>> m_;
  std::vector<std::vector<double>> v_;
};

void adam_update(MlpHead& head, const HeadGradients& grads, AdamState& state);

}  // namespace toolsel::nn
