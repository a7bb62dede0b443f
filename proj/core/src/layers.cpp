// SPDX-License-Identifier: Apache-2.0
#include "sardet/layers.hpp"

#include <cmath>
#include <cstring>

#include "sardet/parallel.hpp"

namespace sardet {

namespace {

// Multi-accumulator dot product; fixed summation order, vectorizable
// without reassociation flags.
inline float dot(const float* a, const float* b, int n) {
  float acc0 = 0.f, acc1 = 0.f, acc2 = 0.f, acc3 = 0.f;
  int i = 0;
  for (; i + 4 <= n; i += 4) {
    acc0 += a[i] * b[i];
    acc1 += a[i + 1] * b[i + 1];
    acc2 += a[i + 2] * b[i + 2];
    acc3 += a[i + 3] * b[i + 3];
  }
  for (; i < n; ++i) acc0 += a[i] * b[i];
  return (acc0 + acc1) + (acc2 + acc3);
}

inline void axpy(float alpha, const float* x, float* y, int n) {
  for (int i = 0; i < n; ++i) y[i] += alpha * x[i];
}

inline bool worth_threads(std::int64_t flops) { return flops >= (1 << 16); }

}  // namespace

void gemm_nn(int m, int n, int k, const float* a, const float* b, float* c, bool accumulate) {
  std::int64_t grain = worth_threads(static_cast<std::int64_t>(m) * n * k) ? 1 : m;
  parallel_for(m, grain, [&](std::int64_t i0, std::int64_t i1) {
    for (std::int64_t i = i0; i < i1; ++i) {
      float* crow = c + i * n;
      if (!accumulate) std::memset(crow, 0, sizeof(float) * n);
      const float* arow = a + i * k;
      for (int kk = 0; kk < k; ++kk) {
        float av = arow[kk];
        if (av != 0.0f) axpy(av, b + static_cast<std::int64_t>(kk) * n, crow, n);
      }
    }
  });
}

void gemm_nt(int m, int n, int k, const float* a, const float* b, float* c, bool accumulate) {
  std::int64_t grain = worth_threads(static_cast<std::int64_t>(m) * n * k) ? 1 : m;
  parallel_for(m, grain, [&](std::int64_t i0, std::int64_t i1) {
    for (std::int64_t i = i0; i < i1; ++i) {
      const float* arow = a + i * k;
      float* crow = c + i * n;
      for (int j = 0; j < n; ++j) {
        float v = dot(arow, b + static_cast<std::int64_t>(j) * k, k);
        crow[j] = accumulate ? crow[j] + v : v;
      }
    }
  });
}

void gemm_tn(int m, int n, int k, const float* a, const float* b, float* c, bool accumulate) {
  std::int64_t grain = worth_threads(static_cast<std::int64_t>(m) * n * k) ? 1 : m;
  parallel_for(m, grain, [&](std::int64_t i0, std::int64_t i1) {
    for (std::int64_t i = i0; i < i1; ++i) {
      float* crow = c + i * n;
      if (!accumulate) std::memset(crow, 0, sizeof(float) * n);
      for (int kk = 0; kk < k; ++kk) {
        float av = a[static_cast<std::int64_t>(kk) * m + i];
        if (av != 0.0f) axpy(av, b + static_cast<std::int64_t>(kk) * n, crow, n);
      }
    }
  });
}

namespace {

void im2col(const float* x, int c, int h, int w, int kernel, int stride, int pad,
            int oh, int ow, float* col) {
  const std::int64_t ncols = static_cast<std::int64_t>(oh) * ow;
  for (int ic = 0; ic < c; ++ic) {
    for (int kh = 0; kh < kernel; ++kh) {
      for (int kw = 0; kw < kernel; ++kw) {
        float* dst = col + ((static_cast<std::int64_t>(ic) * kernel + kh) * kernel + kw) * ncols;
        const float* src = x + static_cast<std::int64_t>(ic) * h * w;
        for (int y = 0; y < oh; ++y) {
          int iy = y * stride + kh - pad;
          float* drow = dst + static_cast<std::int64_t>(y) * ow;
          if (iy < 0 || iy >= h) {
            std::memset(drow, 0, sizeof(float) * ow);
            continue;
          }
          const float* srow = src + static_cast<std::int64_t>(iy) * w;
          for (int xo = 0; xo < ow; ++xo) {
            int ix = xo * stride + kw - pad;
            drow[xo] = (ix >= 0 && ix < w) ? srow[ix] : 0.0f;
          }
        }
      }
    }
  }
}

// Gather form of the im2col adjoint: every input cell sums the column
// entries that reference it, so chunks own disjoint outputs.
void col2im(const float* col, int c, int h, int w, int kernel, int stride, int pad,
            int oh, int ow, float* dx) {
  const std::int64_t ncols = static_cast<std::int64_t>(oh) * ow;
  parallel_for(c, 1, [&](std::int64_t c0, std::int64_t c1) {
    for (std::int64_t ic = c0; ic < c1; ++ic) {
      float* dplane = dx + ic * h * w;
      for (int y = 0; y < h; ++y) {
        for (int xo = 0; xo < w; ++xo) {
          float acc = 0.0f;
          for (int kh = 0; kh < kernel; ++kh) {
            int num = y + pad - kh;
            if (num < 0 || num % stride != 0) continue;
            int ohy = num / stride;
            if (ohy >= oh) continue;
            for (int kw = 0; kw < kernel; ++kw) {
              int num2 = xo + pad - kw;
              if (num2 < 0 || num2 % stride != 0) continue;
              int owx = num2 / stride;
              if (owx >= ow) continue;
              acc += col[((ic * kernel + kh) * kernel + kw) * ncols + ohy * ow + owx];
            }
          }
          dplane[static_cast<std::int64_t>(y) * w + xo] = acc;
        }
      }
    }
  });
}

}  // namespace

Conv2d::Conv2d(std::string name, int in_c, int out_c, int kernel, int stride, bool with_bias)
    : weight(name + ".weight", {out_c, in_c, kernel, kernel}),
      name_(std::move(name)),
      in_c_(in_c),
      out_c_(out_c),
      kernel_(kernel),
      stride_(stride),
      pad_(kernel / 2),
      with_bias_(with_bias) {
  if (stride != 1 && stride != 2) throw param_error(name_ + ": stride must be 1 or 2");
  if (kernel < 1) throw param_error(name_ + ": kernel must be >= 1");
  if (with_bias_) bias.emplace(name_ + ".bias", std::vector<int>{out_c});
}

int Conv2d::out_extent(int in_extent) const {
  return (in_extent + 2 * pad_ - kernel_) / stride_ + 1;
}

std::vector<Param*> Conv2d::params() {
  std::vector<Param*> ps{&weight};
  if (bias) ps.push_back(&*bias);
  return ps;
}

Tensor4 Conv2d::forward(const Tensor4& x, Mode mode) {
  if (x.c != in_c_)
    throw shape_error(name_ + ": input " + x.shape_str() + " does not match weight " +
                      std::to_string(out_c_) + "x" + std::to_string(in_c_) + "x" +
                      std::to_string(kernel_) + "x" + std::to_string(kernel_));
  const int oh = out_extent(x.h), ow = out_extent(x.w);
  if (oh < 1 || ow < 1) throw shape_error(name_ + ": input " + x.shape_str() + " too small");
  Tensor4 y(x.n, out_c_, oh, ow);
  const int kdim = in_c_ * kernel_ * kernel_;
  const std::int64_t ncols = static_cast<std::int64_t>(oh) * ow;
  std::vector<float> col(static_cast<size_t>(kdim) * ncols);
  for (int in = 0; in < x.n; ++in) {
    im2col(x.sample(in), in_c_, x.h, x.w, kernel_, stride_, pad_, oh, ow, col.data());
    gemm_nn(out_c_, static_cast<int>(ncols), kdim, weight.data.data(), col.data(), y.sample(in),
            false);
    if (with_bias_) {
      float* ys = y.sample(in);
      for (int oc = 0; oc < out_c_; ++oc) {
        float b = bias->data[oc];
        float* row = ys + static_cast<std::int64_t>(oc) * ncols;
        for (std::int64_t i = 0; i < ncols; ++i) row[i] += b;
      }
    }
  }
  if (mode == Mode::train) {
    cached_input_ = x;
    cached_ = true;
  }
  return y;
}

Tensor4 Conv2d::backward(const Tensor4& dy) {
  if (!cached_) throw state_error(name_ + ": backward without train-mode forward");
  const Tensor4& x = cached_input_;
  const int oh = out_extent(x.h), ow = out_extent(x.w);
  if (dy.n != x.n || dy.c != out_c_ || dy.h != oh || dy.w != ow)
    throw shape_error(name_ + ": upstream gradient " + dy.shape_str() + " does not match output " +
                      Tensor4(x.n, out_c_, oh, ow).shape_str());

  Tensor4 dx(x.n, in_c_, x.h, x.w);
  const int kdim = in_c_ * kernel_ * kernel_;
  const std::int64_t ncols = static_cast<std::int64_t>(oh) * ow;
  std::vector<float> col(static_cast<size_t>(kdim) * ncols);
  std::vector<float> dcol(static_cast<size_t>(kdim) * ncols);
  for (int in = 0; in < x.n; ++in) {
    im2col(x.sample(in), in_c_, x.h, x.w, kernel_, stride_, pad_, oh, ow, col.data());
    gemm_nt(out_c_, kdim, static_cast<int>(ncols), dy.sample(in), col.data(), weight.grad.data(),
            true);
    gemm_tn(kdim, static_cast<int>(ncols), out_c_, weight.data.data(), dy.sample(in), dcol.data(),
            false);
    col2im(dcol.data(), in_c_, x.h, x.w, kernel_, stride_, pad_, oh, ow, dx.sample(in));
    if (with_bias_) {
      const float* dys = dy.sample(in);
      for (int oc = 0; oc < out_c_; ++oc) {
        float acc = 0.0f;
        const float* row = dys + static_cast<std::int64_t>(oc) * ncols;
        for (std::int64_t i = 0; i < ncols; ++i) acc += row[i];
        bias->grad[oc] += acc;
      }
    }
  }
  cached_ = false;
  return dx;
}

BatchNorm2d::BatchNorm2d(std::string name, int channels)
    : gamma(name + ".gamma", {channels}),
      beta(name + ".beta", {channels}),
      running_mean(name + ".running_mean", {channels}),
      running_var(name + ".running_var", {channels}),
      tracked(name + ".tracked", {1}),
      name_(std::move(name)),
      channels_(channels) {
  std::fill(gamma.data.begin(), gamma.data.end(), 1.0f);
  std::fill(running_var.data.begin(), running_var.data.end(), 1.0f);
}

std::vector<Param*> BatchNorm2d::params() { return {&gamma, &beta}; }
std::vector<Param*> BatchNorm2d::buffers() { return {&running_mean, &running_var, &tracked}; }

Tensor4 BatchNorm2d::forward(const Tensor4& x, Mode mode) {
  if (x.c != channels_)
    throw shape_error(name_ + ": input " + x.shape_str() + " vs " + std::to_string(channels_) +
                      " channels");
  Tensor4 y(x.n, x.c, x.h, x.w);
  const std::int64_t plane = x.plane();
  const std::int64_t m = static_cast<std::int64_t>(x.n) * plane;

  if (mode == Mode::eval) {
    if (!stats_ready()) throw state_error(name_ + ": eval-mode forward before any statistics");
    parallel_for(channels_, 1, [&](std::int64_t c0, std::int64_t c1) {
      for (std::int64_t ic = c0; ic < c1; ++ic) {
        float inv = 1.0f / std::sqrt(running_var.data[ic] + kEps);
        float g = gamma.data[ic] * inv;
        float b = beta.data[ic] - running_mean.data[ic] * g;
        for (int in = 0; in < x.n; ++in) {
          const float* xs = x.sample(in) + ic * plane;
          float* ys = y.sample(in) + ic * plane;
          for (std::int64_t i = 0; i < plane; ++i) ys[i] = g * xs[i] + b;
        }
      }
    });
    return y;
  }

  cached_xhat_ = Tensor4(x.n, x.c, x.h, x.w);
  cached_inv_std_.assign(channels_, 0.0f);
  parallel_for(channels_, 1, [&](std::int64_t c0, std::int64_t c1) {
    for (std::int64_t ic = c0; ic < c1; ++ic) {
      double sum = 0.0, sq = 0.0;
      for (int in = 0; in < x.n; ++in) {
        const float* xs = x.sample(in) + ic * plane;
        for (std::int64_t i = 0; i < plane; ++i) {
          sum += xs[i];
          sq += static_cast<double>(xs[i]) * xs[i];
        }
      }
      double mean = sum / static_cast<double>(m);
      double var = sq / static_cast<double>(m) - mean * mean;
      if (var < 0.0) var = 0.0;
      float inv = static_cast<float>(1.0 / std::sqrt(var + kEps));
      cached_inv_std_[ic] = inv;
      float mu = static_cast<float>(mean);
      float g = gamma.data[ic], b = beta.data[ic];
      for (int in = 0; in < x.n; ++in) {
        const float* xs = x.sample(in) + ic * plane;
        float* xh = cached_xhat_.sample(in) + ic * plane;
        float* ys = y.sample(in) + ic * plane;
        for (std::int64_t i = 0; i < plane; ++i) {
          float v = (xs[i] - mu) * inv;
          xh[i] = v;
          ys[i] = g * v + b;
        }
      }
      double unbiased = m > 1 ? var * static_cast<double>(m) / static_cast<double>(m - 1) : var;
      running_mean.data[ic] = (1.0f - kMomentum) * running_mean.data[ic] + kMomentum * mu;
      running_var.data[ic] =
          (1.0f - kMomentum) * running_var.data[ic] + kMomentum * static_cast<float>(unbiased);
    }
  });
  tracked.data[0] += 1.0f;
  cached_ = true;
  return y;
}

Tensor4 BatchNorm2d::backward(const Tensor4& dy) {
  if (!cached_) throw state_error(name_ + ": backward without train-mode forward");
  if (!dy.same_shape(cached_xhat_))
    throw shape_error(name_ + ": gradient " + dy.shape_str() + " vs cached " +
                      cached_xhat_.shape_str());
  Tensor4 dx(dy.n, dy.c, dy.h, dy.w);
  const std::int64_t plane = dy.plane();
  const std::int64_t m = static_cast<std::int64_t>(dy.n) * plane;
  parallel_for(channels_, 1, [&](std::int64_t c0, std::int64_t c1) {
    for (std::int64_t ic = c0; ic < c1; ++ic) {
      double s1 = 0.0, s2 = 0.0;
      for (int in = 0; in < dy.n; ++in) {
        const float* ds = dy.sample(in) + ic * plane;
        const float* xh = cached_xhat_.sample(in) + ic * plane;
        for (std::int64_t i = 0; i < plane; ++i) {
          s1 += ds[i];
          s2 += static_cast<double>(ds[i]) * xh[i];
        }
      }
      gamma.grad[ic] += static_cast<float>(s2);
      beta.grad[ic] += static_cast<float>(s1);
      const float g = gamma.data[ic] * cached_inv_std_[ic];
      const float mean_dy = static_cast<float>(s1 / static_cast<double>(m));
      const float mean_dy_xhat = static_cast<float>(s2 / static_cast<double>(m));
      for (int in = 0; in < dy.n; ++in) {
        const float* ds = dy.sample(in) + ic * plane;
        const float* xh = cached_xhat_.sample(in) + ic * plane;
        float* dxs = dx.sample(in) + ic * plane;
        for (std::int64_t i = 0; i < plane; ++i)
          dxs[i] = g * (ds[i] - mean_dy - xh[i] * mean_dy_xhat);
      }
    }
  });
  cached_ = false;
  return dx;
}

Tensor4 ReLU::forward(const Tensor4& x, Mode mode) {
  Tensor4 y(x.n, x.c, x.h, x.w);
  const std::int64_t total = x.size();
  parallel_for(total, 1 << 16, [&](std::int64_t i0, std::int64_t i1) {
    for (std::int64_t i = i0; i < i1; ++i) y.data[i] = x.data[i] > 0.0f ? x.data[i] : 0.0f;
  });
  if (mode == Mode::train) {
    cached_out_ = y;
    cached_ = true;
  }
  return y;
}

Tensor4 ReLU::backward(const Tensor4& dy) {
  if (!cached_) throw state_error("relu: backward without train-mode forward");
  if (!dy.same_shape(cached_out_))
    throw shape_error("relu: gradient " + dy.shape_str() + " vs cached " +
                      cached_out_.shape_str());
  Tensor4 dx(dy.n, dy.c, dy.h, dy.w);
  for (std::int64_t i = 0; i < dy.size(); ++i)
    dx.data[i] = cached_out_.data[i] > 0.0f ? dy.data[i] : 0.0f;
  cached_ = false;
  return dx;
}

Tensor4 MaxPool3x3s2::forward(const Tensor4& x, Mode mode) {
  const int oh = out_extent(x.h), ow = out_extent(x.w);
  if (oh < 1 || ow < 1) throw shape_error("maxpool: input " + x.shape_str() + " too small");
  Tensor4 y(x.n, x.c, oh, ow);
  const std::int64_t planes = static_cast<std::int64_t>(x.n) * x.c;
  std::vector<std::int32_t> argmax(static_cast<size_t>(planes) * oh * ow);
  parallel_for(planes, 1, [&](std::int64_t p0, std::int64_t p1) {
    for (std::int64_t p = p0; p < p1; ++p) {
      const float* xp = x.data.data() + p * x.h * x.w;
      float* yp = y.data.data() + p * oh * ow;
      std::int32_t* ap = argmax.data() + p * oh * ow;
      for (int yo = 0; yo < oh; ++yo) {
        for (int xo = 0; xo < ow; ++xo) {
          float best = -std::numeric_limits<float>::infinity();
          std::int32_t best_idx = 0;
          for (int kh = 0; kh < 3; ++kh) {
            int iy = yo * 2 + kh - 1;
            if (iy < 0 || iy >= x.h) continue;
            for (int kw = 0; kw < 3; ++kw) {
              int ix = xo * 2 + kw - 1;
              if (ix < 0 || ix >= x.w) continue;
              float v = xp[iy * x.w + ix];
              if (v > best) {
                best = v;
                best_idx = iy * x.w + ix;
              }
            }
          }
          yp[yo * ow + xo] = best;
          ap[yo * ow + xo] = best_idx;
        }
      }
    }
  });
  if (mode == Mode::train) {
    cached_argmax_ = std::move(argmax);
    in_n_ = x.n;
    in_c_ = x.c;
    in_h_ = x.h;
    in_w_ = x.w;
    cached_ = true;
  }
  return y;
}

Tensor4 MaxPool3x3s2::backward(const Tensor4& dy) {
  if (!cached_) throw state_error("maxpool: backward without train-mode forward");
  const int oh = out_extent(in_h_), ow = out_extent(in_w_);
  if (dy.n != in_n_ || dy.c != in_c_ || dy.h != oh || dy.w != ow)
    throw shape_error("maxpool: gradient " + dy.shape_str() + " unexpected");
  Tensor4 dx(in_n_, in_c_, in_h_, in_w_);
  const std::int64_t planes = static_cast<std::int64_t>(in_n_) * in_c_;
  parallel_for(planes, 1, [&](std::int64_t p0, std::int64_t p1) {
    for (std::int64_t p = p0; p < p1; ++p) {
      const float* dyp = dy.data.data() + p * oh * ow;
      const std::int32_t* ap = cached_argmax_.data() + p * oh * ow;
      float* dxp = dx.data.data() + p * in_h_ * in_w_;
      for (int i = 0; i < oh * ow; ++i) dxp[ap[i]] += dyp[i];
    }
  });
  cached_ = false;
  return dx;
}

}  // namespace sardet
