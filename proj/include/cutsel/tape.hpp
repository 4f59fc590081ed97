#pragma once

#include <functional>
#include <string>
#include <unordered_map>
#include <vector>

#include "cutsel/tensor.hpp"

namespace cutsel {

// A trainable tensor with an accumulated gradient slot.
struct Parameter {
  std::string name;
  Tensor value;
  Tensor grad;

  Parameter() = default;
  Parameter(std::string n, int r, int c)
      : name(std::move(n)), value(r, c), grad(r, c) {}

  void zero_grad() { grad.fill(0.0); }
};

using ParamList = std::vector<Parameter*>;

// Reverse-mode autodiff over tensor-level operations. A tape is rebuilt for
// every sample; backward() seeds a scalar head and accumulates parameter
// gradients into the bound Parameter::grad slots.
class Tape {
 public:
  // Leaf nodes are cached: repeated uses of one parameter share a node.
  int leaf(Parameter& p);
  int constant(Tensor t);
  int scalar(double x) { return constant(Tensor::scalar(x)); }

  int matvec(int w, int x);                 // (r x c) * (c x 1)
  int add(int a, int b);                    // same shape
  int sub(int a, int b);
  int mul(int a, int b);                    // elementwise
  int affine(int w, int x, int b);          // w*x + b
  int tanh_op(int a);
  int sigmoid_op(int a);
  int exp_op(int a);
  int log_op(int a);
  int scale(int a, double s);
  int add_scalar(int a, double s);
  int clamp_op(int a, double lo, double hi);  // zero gradient outside (lo, hi)
  int normal_cdf(int a);                      // elementwise standard-normal CDF
  int dot(int a, int b);                      // vectors -> 1 x 1
  int sum(int a);                             // -> 1 x 1
  int pick(int a, int index);                 // vector element -> 1 x 1
  int stack(const std::vector<int>& scalars); // k scalars -> k x 1

  // log softmax(logits restricted to mask)[picked]; masked entries ignored.
  int masked_log_softmax_pick(int logits, const std::vector<char>& mask, int picked);

  const Tensor& val(int id) const { return nodes_[static_cast<std::size_t>(id)].value; }
  const Tensor& grad_of(int id) const { return nodes_[static_cast<std::size_t>(id)].grad; }

  // Seeds d(head)=1 and sweeps the tape. The head must be 1 x 1 and finite.
  void backward(int head);

  int size() const { return static_cast<int>(nodes_.size()); }

 private:
  struct Node {
    Tensor value;
    Tensor grad;
    Parameter* bound = nullptr;
    std::function<void()> back;  // empty for leaves and constants
  };

  Node& node(int id) { return nodes_[static_cast<std::size_t>(id)]; }
  int push(Tensor value);

  std::vector<Node> nodes_;
  std::unordered_map<const Parameter*, int> leaf_cache_;
};

}  // namespace cutsel
