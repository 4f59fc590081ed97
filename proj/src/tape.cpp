#include "cutsel/tape.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "cutsel/milp.hpp"

namespace cutsel {

int Tape::push(Tensor value) {
  Node node;
  node.grad = Tensor(value.rows, value.cols);
  node.value = std::move(value);
  nodes_.push_back(std::move(node));
  return static_cast<int>(nodes_.size()) - 1;
}

int Tape::leaf(Parameter& p) {
  const auto it = leaf_cache_.find(&p);
  if (it != leaf_cache_.end()) return it->second;
  const int id = push(p.value);
  node(id).bound = &p;
  leaf_cache_.emplace(&p, id);
  return id;
}

int Tape::constant(Tensor t) { return push(std::move(t)); }

int Tape::matvec(int w, int x) {
  const Tensor& W = val(w);
  const Tensor& X = val(x);
  require_shape(X.cols == 1 && W.cols == X.rows, "matvec shapes");
  Tensor out(W.rows, 1);
  for (int r = 0; r < W.rows; ++r) {
    double acc = 0.0;
    const double* wr = &W.v[static_cast<std::size_t>(r) * W.cols];
    for (int c = 0; c < W.cols; ++c) acc += wr[c] * X.v[static_cast<std::size_t>(c)];
    out.v[static_cast<std::size_t>(r)] = acc;
  }
  const int id = push(std::move(out));
  node(id).back = [this, id, w, x]() {
    const Tensor& g = node(id).grad;
    const Tensor& W = val(w);
    const Tensor& X = val(x);
    Tensor& gw = node(w).grad;
    Tensor& gx = node(x).grad;
    for (int r = 0; r < W.rows; ++r) {
      const double gr = g.v[static_cast<std::size_t>(r)];
      if (gr == 0.0) continue;
      double* gwr = &gw.v[static_cast<std::size_t>(r) * W.cols];
      const double* wr = &W.v[static_cast<std::size_t>(r) * W.cols];
      for (int c = 0; c < W.cols; ++c) {
        gwr[c] += gr * X.v[static_cast<std::size_t>(c)];
        gx.v[static_cast<std::size_t>(c)] += gr * wr[c];
      }
    }
  };
  return id;
}

int Tape::add(int a, int b) {
  const Tensor& A = val(a);
  const Tensor& B = val(b);
  require_shape(A.same_shape(B), "add shapes");
  Tensor out = A;
  for (int i = 0; i < out.numel(); ++i) out.v[static_cast<std::size_t>(i)] += B.v[static_cast<std::size_t>(i)];
  const int id = push(std::move(out));
  node(id).back = [this, id, a, b]() {
    const Tensor& g = node(id).grad;
    for (int i = 0; i < g.numel(); ++i) {
      node(a).grad.v[static_cast<std::size_t>(i)] += g.v[static_cast<std::size_t>(i)];
      node(b).grad.v[static_cast<std::size_t>(i)] += g.v[static_cast<std::size_t>(i)];
    }
  };
  return id;
}

int Tape::sub(int a, int b) {
  const Tensor& A = val(a);
  const Tensor& B = val(b);
  require_shape(A.same_shape(B), "sub shapes");
  Tensor out = A;
  for (int i = 0; i < out.numel(); ++i) out.v[static_cast<std::size_t>(i)] -= B.v[static_cast<std::size_t>(i)];
  const int id = push(std::move(out));
  node(id).back = [this, id, a, b]() {
    const Tensor& g = node(id).grad;
    for (int i = 0; i < g.numel(); ++i) {
      node(a).grad.v[static_cast<std::size_t>(i)] += g.v[static_cast<std::size_t>(i)];
      node(b).grad.v[static_cast<std::size_t>(i)] -= g.v[static_cast<std::size_t>(i)];
    }
  };
  return id;
}

int Tape::mul(int a, int b) {
  const Tensor& A = val(a);
  const Tensor& B = val(b);
  require_shape(A.same_shape(B), "mul shapes");
  Tensor out = A;
  for (int i = 0; i < out.numel(); ++i) out.v[static_cast<std::size_t>(i)] *= B.v[static_cast<std::size_t>(i)];
  const int id = push(std::move(out));
  node(id).back = [this, id, a, b]() {
    const Tensor& g = node(id).grad;
    const Tensor& A = val(a);
    const Tensor& B = val(b);
    for (int i = 0; i < g.numel(); ++i) {
      node(a).grad.v[static_cast<std::size_t>(i)] += g.v[static_cast<std::size_t>(i)] * B.v[static_cast<std::size_t>(i)];
      node(b).grad.v[static_cast<std::size_t>(i)] += g.v[static_cast<std::size_t>(i)] * A.v[static_cast<std::size_t>(i)];
    }
  };
  return id;
}

int Tape::affine(int w, int x, int b) { return add(matvec(w, x), b); }

int Tape::tanh_op(int a) {
  Tensor out = val(a);
  for (double& x : out.v) x = std::tanh(x);
  const int id = push(std::move(out));
  node(id).back = [this, id, a]() {
    const Tensor& g = node(id).grad;
    const Tensor& y = val(id);
    for (int i = 0; i < g.numel(); ++i) {
      const double yi = y.v[static_cast<std::size_t>(i)];
      node(a).grad.v[static_cast<std::size_t>(i)] += g.v[static_cast<std::size_t>(i)] * (1.0 - yi * yi);
    }
  };
  return id;
}

int Tape::sigmoid_op(int a) {
  Tensor out = val(a);
  for (double& x : out.v) x = 1.0 / (1.0 + std::exp(-x));
  const int id = push(std::move(out));
  node(id).back = [this, id, a]() {
    const Tensor& g = node(id).grad;
    const Tensor& y = val(id);
    for (int i = 0; i < g.numel(); ++i) {
      const double yi = y.v[static_cast<std::size_t>(i)];
      node(a).grad.v[static_cast<std::size_t>(i)] += g.v[static_cast<std::size_t>(i)] * yi * (1.0 - yi);
    }
  };
  return id;
}

int Tape::exp_op(int a) {
  Tensor out = val(a);
  for (double& x : out.v) x = std::exp(x);
  const int id = push(std::move(out));
  node(id).back = [this, id, a]() {
    const Tensor& g = node(id).grad;
    const Tensor& y = val(id);
    for (int i = 0; i < g.numel(); ++i)
      node(a).grad.v[static_cast<std::size_t>(i)] += g.v[static_cast<std::size_t>(i)] * y.v[static_cast<std::size_t>(i)];
  };
  return id;
}

int Tape::log_op(int a) {
  Tensor out = val(a);
  for (double& x : out.v) x = std::log(x);
  if (!out.finite()) throw NonFiniteDetected("log of a non-positive value");
  const int id = push(std::move(out));
  node(id).back = [this, id, a]() {
    const Tensor& g = node(id).grad;
    const Tensor& x = val(a);
    for (int i = 0; i < g.numel(); ++i)
      node(a).grad.v[static_cast<std::size_t>(i)] += g.v[static_cast<std::size_t>(i)] / x.v[static_cast<std::size_t>(i)];
  };
  return id;
}

int Tape::scale(int a, double s) {
  Tensor out = val(a);
  for (double& x : out.v) x *= s;
  const int id = push(std::move(out));
  node(id).back = [this, id, a, s]() {
    const Tensor& g = node(id).grad;
    for (int i = 0; i < g.numel(); ++i)
      node(a).grad.v[static_cast<std::size_t>(i)] += g.v[static_cast<std::size_t>(i)] * s;
  };
  return id;
}

int Tape::add_scalar(int a, double s) {
  Tensor out = val(a);
  for (double& x : out.v) x += s;
  const int id = push(std::move(out));
  node(id).back = [this, id, a]() {
    const Tensor& g = node(id).grad;
    for (int i = 0; i < g.numel(); ++i)
      node(a).grad.v[static_cast<std::size_t>(i)] += g.v[static_cast<std::size_t>(i)];
  };
  return id;
}

int Tape::clamp_op(int a, double lo, double hi) {
  Tensor out = val(a);
  for (double& x : out.v) x = std::clamp(x, lo, hi);
  const int id = push(std::move(out));
  node(id).back = [this, id, a, lo, hi]() {
    const Tensor& g = node(id).grad;
    const Tensor& x = val(a);
    for (int i = 0; i < g.numel(); ++i) {
      const double xi = x.v[static_cast<std::size_t>(i)];
      if (xi > lo && xi < hi)
        node(a).grad.v[static_cast<std::size_t>(i)] += g.v[static_cast<std::size_t>(i)];
    }
  };
  return id;
}

int Tape::normal_cdf(int a) {
  Tensor out = val(a);
  for (double& x : out.v) x = 0.5 * std::erfc(-x / std::numbers::sqrt2);
  const int id = push(std::move(out));
  node(id).back = [this, id, a]() {
    const Tensor& g = node(id).grad;
    const Tensor& x = val(a);
    constexpr double kInvSqrt2Pi = 0.3989422804014327;
    for (int i = 0; i < g.numel(); ++i) {
      const double xi = x.v[static_cast<std::size_t>(i)];
      node(a).grad.v[static_cast<std::size_t>(i)] +=
          g.v[static_cast<std::size_t>(i)] * kInvSqrt2Pi * std::exp(-0.5 * xi * xi);
    }
  };
  return id;
}

int Tape::dot(int a, int b) {
  const Tensor& A = val(a);
  const Tensor& B = val(b);
  require_shape(A.same_shape(B) && A.cols == 1, "dot shapes");
  double acc = 0.0;
  for (int i = 0; i < A.numel(); ++i) acc += A.v[static_cast<std::size_t>(i)] * B.v[static_cast<std::size_t>(i)];
  const int id = push(Tensor::scalar(acc));
  node(id).back = [this, id, a, b]() {
    const double g = node(id).grad.v[0];
    if (g == 0.0) return;
    const Tensor& A = val(a);
    const Tensor& B = val(b);
    for (int i = 0; i < A.numel(); ++i) {
      node(a).grad.v[static_cast<std::size_t>(i)] += g * B.v[static_cast<std::size_t>(i)];
      node(b).grad.v[static_cast<std::size_t>(i)] += g * A.v[static_cast<std::size_t>(i)];
    }
  };
  return id;
}

int Tape::sum(int a) {
  const Tensor& A = val(a);
  double acc = 0.0;
  for (double x : A.v) acc += x;
  const int id = push(Tensor::scalar(acc));
  node(id).back = [this, id, a]() {
    const double g = node(id).grad.v[0];
    if (g == 0.0) return;
    for (int i = 0; i < node(a).grad.numel(); ++i)
      node(a).grad.v[static_cast<std::size_t>(i)] += g;
  };
  return id;
}

int Tape::pick(int a, int index) {
  const Tensor& A = val(a);
  require_shape(A.cols == 1 && index >= 0 && index < A.rows, "pick index");
  const int id = push(Tensor::scalar(A.v[static_cast<std::size_t>(index)]));
  node(id).back = [this, id, a, index]() {
    node(a).grad.v[static_cast<std::size_t>(index)] += node(id).grad.v[0];
  };
  return id;
}

int Tape::stack(const std::vector<int>& scalars) {
  Tensor out(static_cast<int>(scalars.size()), 1);
  for (std::size_t i = 0; i < scalars.size(); ++i) {
    require_shape(val(scalars[i]).numel() == 1, "stack inputs must be scalars");
    out.v[i] = val(scalars[i]).v[0];
  }
  const int id = push(std::move(out));
  std::vector<int> parents = scalars;
  node(id).back = [this, id, parents]() {
    const Tensor& g = node(id).grad;
    for (std::size_t i = 0; i < parents.size(); ++i)
      node(parents[i]).grad.v[0] += g.v[i];
  };
  return id;
}

int Tape::masked_log_softmax_pick(int logits, const std::vector<char>& mask, int picked) {
  const Tensor& L = val(logits);
  require_shape(L.cols == 1, "logits must be a vector");
  require_shape(static_cast<int>(mask.size()) == L.rows, "mask length");
  require_shape(picked >= 0 && picked < L.rows && mask[static_cast<std::size_t>(picked)],
                "picked index must be unmasked");
  double max_logit = -kInf;
  for (int i = 0; i < L.rows; ++i)
    if (mask[static_cast<std::size_t>(i)]) max_logit = std::max(max_logit, L.v[static_cast<std::size_t>(i)]);
  double z = 0.0;
  for (int i = 0; i < L.rows; ++i)
    if (mask[static_cast<std::size_t>(i)]) z += std::exp(L.v[static_cast<std::size_t>(i)] - max_logit);
  const double lse = max_logit + std::log(z);
  const double logp = L.v[static_cast<std::size_t>(picked)] - lse;
  const int id = push(Tensor::scalar(logp));
  std::vector<char> m = mask;
  node(id).back = [this, id, logits, m, picked, lse]() {
    const double g = node(id).grad.v[0];
    if (g == 0.0) return;
    const Tensor& L = val(logits);
    Tensor& gl = node(logits).grad;
    for (int i = 0; i < L.rows; ++i) {
      if (!m[static_cast<std::size_t>(i)]) continue;
      const double p = std::exp(L.v[static_cast<std::size_t>(i)] - lse);
      gl.v[static_cast<std::size_t>(i)] += g * ((i == picked ? 1.0 : 0.0) - p);
    }
  };
  return id;
}

void Tape::backward(int head) {
  require_shape(val(head).numel() == 1, "backward head must be scalar");
  if (!std::isfinite(val(head).v[0]))
    throw NonFiniteDetected("non-finite value at tape head");
  node(head).grad.v[0] = 1.0;
  for (int id = head; id >= 0; --id) {
    Node& nd = node(id);
    if (nd.back) nd.back();
    if (nd.bound != nullptr) {
      for (int i = 0; i < nd.grad.numel(); ++i)
        nd.bound->grad.v[static_cast<std::size_t>(i)] += nd.grad.v[static_cast<std::size_t>(i)];
    }
  }
}

}  // namespace cutsel
