// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sardet/tensor.hpp"

namespace sardet {

enum class Mode { train, eval };

/// C[MxN] (+)= op(A) * op(B), row-major. Split across the thread pool by
/// rows of C; every output element is owned by one chunk, so results are
/// bit-identical for any thread count.
void gemm_nn(int m, int n, int k, const float* a, const float* b, float* c, bool accumulate);
void gemm_nt(int m, int n, int k, const float* a, const float* b, float* c, bool accumulate);
void gemm_tn(int m, int n, int k, const float* a, const float* b, float* c, bool accumulate);

/// 2D cross-correlation with square kernel, padding k/2, stride 1 or 2.
/// Implemented as im2col + GEMM. Weights are stored [out_c, in_c, k, k];
/// bias is optional (present on the detection head only).
class Conv2d {
public:
  Conv2d(std::string name, int in_c, int out_c, int kernel, int stride, bool with_bias);

  Tensor4 forward(const Tensor4& x, Mode mode);
  Tensor4 backward(const Tensor4& dy);

  std::vector<Param*> params();

  int in_channels() const { return in_c_; }
  int out_channels() const { return out_c_; }
  int kernel() const { return kernel_; }
  int stride() const { return stride_; }
  bool has_bias() const { return with_bias_; }
  int out_extent(int in_extent) const;

  Param weight;
  std::optional<Param> bias;

private:
  std::string name_;
  int in_c_, out_c_, kernel_, stride_, pad_;
  bool with_bias_;
  Tensor4 cached_input_;
  bool cached_ = false;
};

/// Per-channel batch normalization, eps 1e-5, running-stat momentum 0.1.
/// Train mode normalizes by batch statistics and refreshes the running
/// estimates; eval mode requires statistics recorded earlier.
class BatchNorm2d {
public:
  BatchNorm2d(std::string name, int channels);

  Tensor4 forward(const Tensor4& x, Mode mode);
  Tensor4 backward(const Tensor4& dy);

  std::vector<Param*> params();
  std::vector<Param*> buffers();

  bool stats_ready() const { return tracked.data[0] > 0.0f; }

  Param gamma, beta;
  Param running_mean, running_var;
  Param tracked;  // single counter; > 0 once stats exist

  static constexpr float kEps = 1e-5f;
  static constexpr float kMomentum = 0.1f;

private:
  std::string name_;
  int channels_;
  Tensor4 cached_xhat_;
  std::vector<float> cached_inv_std_;
  bool cached_ = false;
};

class ReLU {
public:
  Tensor4 forward(const Tensor4& x, Mode mode);
  Tensor4 backward(const Tensor4& dy);

private:
  Tensor4 cached_out_;
  bool cached_ = false;
};

/// 3x3 max pooling, stride 2, padding 1 (the backbone stem's pool).
class MaxPool3x3s2 {
public:
  Tensor4 forward(const Tensor4& x, Mode mode);
  Tensor4 backward(const Tensor4& dy);

  static int out_extent(int in_extent) { return (in_extent + 2 - 3) / 2 + 1; }

private:
  std::vector<std::int32_t> cached_argmax_;
  int in_n_ = 0, in_c_ = 0, in_h_ = 0, in_w_ = 0;
  bool cached_ = false;
};

}  // namespace sardet
