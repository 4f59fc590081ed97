#include "cutsel/adam.hpp"

#include <cmath>

namespace cutsel {

void adam_step(const ParamList& params, AdamState& state) {
  for (const Parameter* p : params)
    if (!p->grad.finite())
      throw NonFiniteDetected("non-finite gradient in " + p->name);
  if (state.m.empty()) {
    for (const Parameter* p : params) {
      state.m.emplace_back(p->value.rows, p->value.cols);
      state.v.emplace_back(p->value.rows, p->value.cols);
    }
  }
  require_shape(state.m.size() == params.size(), "adam state size");
  ++state.step_count;
  const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step_count));
  const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step_count));
  for (std::size_t k = 0; k < params.size(); ++k) {
    Parameter& p = *params[k];
    Tensor& m = state.m[k];
    Tensor& v = state.v[k];
    require_shape(m.same_shape(p.value), "adam moment shape");
    for (int i = 0; i < p.value.numel(); ++i) {
      const auto u = static_cast<std::size_t>(i);
      const double g = p.grad.v[u];
      m.v[u] = state.beta1 * m.v[u] + (1.0 - state.beta1) * g;
      v.v[u] = state.beta2 * v.v[u] + (1.0 - state.beta2) * g * g;
      const double mhat = m.v[u] / bc1;
      const double vhat = v.v[u] / bc2;
      p.value.v[u] -= state.lr * mhat / (std::sqrt(vhat) + state.eps);
    }
  }
}

}  // namespace cutsel
