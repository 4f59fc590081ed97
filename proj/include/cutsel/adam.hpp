#pragma once

#include <vector>

#include "cutsel/tape.hpp"

namespace cutsel {

// Adam with bias correction. Minimizes: params step against the gradient.
struct AdamState {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  long step_count = 0;
  std::vector<Tensor> m, v;  // lazily sized parallel to the param list

  explicit AdamState(double learning_rate = 1e-3) : lr(learning_rate) {}
};

// One update from the gradients accumulated in params. Throws
// NonFiniteDetected (before touching any parameter) if a gradient is not
// finite. Gradients are left untouched; callers zero them between steps.
void adam_step(const ParamList& params, AdamState& state);

}  // namespace cutsel
