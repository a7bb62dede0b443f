// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sardet/errors.hpp"

namespace sardet {

/// Dense N-C-H-W float tensor, row-major.
struct Tensor4 {
  int n = 0, c = 0, h = 0, w = 0;
  std::vector<float> data;

  Tensor4() = default;
  Tensor4(int n_, int c_, int h_, int w_)
      : n(n_), c(c_), h(h_), w(w_), data(static_cast<size_t>(n_) * c_ * h_ * w_, 0.0f) {
    if (n_ < 1 || c_ < 1 || h_ < 1 || w_ < 1)
      throw shape_error("Tensor4: all dims must be >= 1, got " + shape_str());
  }

  std::int64_t size() const { return static_cast<std::int64_t>(n) * c * h * w; }
  std::int64_t plane() const { return static_cast<std::int64_t>(h) * w; }

  float& at(int in, int ic, int ih, int iw) {
    return data[((static_cast<std::int64_t>(in) * c + ic) * h + ih) * w + iw];
  }
  float at(int in, int ic, int ih, int iw) const {
    return data[((static_cast<std::int64_t>(in) * c + ic) * h + ih) * w + iw];
  }
  float* sample(int in) { return data.data() + static_cast<std::int64_t>(in) * c * plane(); }
  const float* sample(int in) const {
    return data.data() + static_cast<std::int64_t>(in) * c * plane();
  }

  bool same_shape(const Tensor4& o) const {
    return n == o.n && c == o.c && h == o.h && w == o.w;
  }
  std::string shape_str() const {
    return std::to_string(n) + "x" + std::to_string(c) + "x" + std::to_string(h) + "x" +
           std::to_string(w);
  }
};

/// Named trainable parameter (or persistent buffer when grad is unused).
struct Param {
  std::string name;
  std::vector<int> shape;
  std::vector<float> data;
  std::vector<float> grad;

  Param() = default;
  Param(std::string name_, std::vector<int> shape_);

  std::int64_t size() const { return static_cast<std::int64_t>(data.size()); }
  void zero_grad() { std::fill(grad.begin(), grad.end(), 0.0f); }
};

}  // namespace sardet
