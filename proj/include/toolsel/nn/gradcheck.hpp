#pragma once

#include <cstddef>

#include "toolsel/nn/dense.hpp"

namespace toolsel::nn {

struct GradcheckResult {
  double max_relative_error = 0.0;
  std::size_t worst_block = 0;  // index into parameter_blocks order
  std::size_t worst_index = 0;
  std::size_t parameters_checked = 0;
};

// Central finite differences of the batch MSE against head_backward, over
// every parameter. Relative error is |a - n| / max(|a|, |n|, 1e-8).
// The perturbation must lie in [1e-6, 1e-3].
GradcheckResult gradcheck(const MlpHead& head, const Matrix& inputs, const Matrix& targets,
                          double perturbation);

}  // namespace toolsel::nn
