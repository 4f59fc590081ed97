#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "cutsel/errors.hpp"

namespace cutsel {

// Dense row-major matrix of doubles; vectors are r x 1.
struct Tensor {
  int rows = 0, cols = 0;
  std::vector<double> v;

  Tensor() = default;
  Tensor(int r, int c) : rows(r), cols(c), v(static_cast<std::size_t>(r) * c, 0.0) {}

  static Tensor zeros(int r, int c) { return Tensor(r, c); }
  static Tensor scalar(double x) {
    Tensor t(1, 1);
    t.v[0] = x;
    return t;
  }
  static Tensor column(const std::vector<double>& data) {
    Tensor t(static_cast<int>(data.size()), 1);
    t.v = data;
    return t;
  }

  int numel() const { return rows * cols; }
  double& at(int r, int c) { return v[static_cast<std::size_t>(r) * cols + c]; }
  double at(int r, int c) const { return v[static_cast<std::size_t>(r) * cols + c]; }

  bool same_shape(const Tensor& o) const { return rows == o.rows && cols == o.cols; }

  bool finite() const {
    for (double x : v)
      if (!std::isfinite(x)) return false;
    return true;
  }

  void fill(double x) { std::fill(v.begin(), v.end(), x); }
};

inline void require_shape(bool ok, const std::string& what) {
  if (!ok) throw ShapeMismatch(what);
}

}  // namespace cutsel
