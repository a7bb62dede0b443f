// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>
#include <cstring>
#include <vector>

#include "sardet/parallel.hpp"
#include "sardet/quantize.hpp"

namespace sardet {

namespace {

inline std::int32_t dot_i8(const std::int8_t* a, const std::int8_t* b, int n) {
  std::int32_t acc0 = 0, acc1 = 0, acc2 = 0, acc3 = 0;
  int i = 0;
  for (; i + 4 <= n; i += 4) {
    acc0 += static_cast<std::int32_t>(a[i]) * b[i];
    acc1 += static_cast<std::int32_t>(a[i + 1]) * b[i + 1];
    acc2 += static_cast<std::int32_t>(a[i + 2]) * b[i + 2];
    acc3 += static_cast<std::int32_t>(a[i + 3]) * b[i + 3];
  }
  for (; i < n; ++i) acc0 += static_cast<std::int32_t>(a[i]) * b[i];
  return (acc0 + acc1) + (acc2 + acc3);
}

inline std::int8_t sat8(std::int32_t v) {
  return static_cast<std::int8_t>(std::clamp(v, -128, 127));
}

// Patch-major im2col: out[pixel][K], padding cells filled with the
// input zero point so the weight-sum correction treats them as real 0.
void im2col_i8(const std::int8_t* x, int c, int h, int w, int kernel, int stride, int pad,
               int oh, int ow, std::int8_t pad_value, std::int8_t* out) {
  const int kdim = c * kernel * kernel;
  for (int yo = 0; yo < oh; ++yo) {
    for (int xo = 0; xo < ow; ++xo) {
      std::int8_t* patch = out + (static_cast<std::int64_t>(yo) * ow + xo) * kdim;
      int at = 0;
      for (int ic = 0; ic < c; ++ic) {
        const std::int8_t* plane = x + static_cast<std::int64_t>(ic) * h * w;
        for (int kh = 0; kh < kernel; ++kh) {
          int iy = yo * stride + kh - pad;
          for (int kw = 0; kw < kernel; ++kw, ++at) {
            int ix = xo * stride + kw - pad;
            patch[at] = (iy >= 0 && iy < h && ix >= 0 && ix < w)
                            ? plane[static_cast<std::int64_t>(iy) * w + ix]
                            : pad_value;
          }
        }
      }
    }
  }
}

struct I8Plane {
  int c = 0, h = 0, w = 0;
  std::vector<std::int8_t> data;
};

// Integer conv producing, per output element, the accumulator already
// rescaled to the destination activation's units (one fixed-point
// rounding), without zero point or saturation applied.
void conv_to_out_units(const QConvLayer& q, const I8Plane& x, int zp_in,
                       std::vector<std::int32_t>& out, int& oh, int& ow,
                       std::vector<std::int8_t>& scratch) {
  oh = q.out_extent(x.h);
  ow = q.out_extent(x.w);
  const int kdim = q.in_c * q.kernel * q.kernel;
  const std::int64_t ncols = static_cast<std::int64_t>(oh) * ow;
  scratch.resize(static_cast<size_t>(ncols) * kdim);
  im2col_i8(x.data.data(), x.c, x.h, x.w, q.kernel, q.stride, q.kernel / 2, oh, ow,
            static_cast<std::int8_t>(zp_in), scratch.data());
  out.resize(static_cast<size_t>(q.out_c) * ncols);
  for (int o = 0; o < q.out_c; ++o) {
    const std::int8_t* wrow = q.weight.data() + static_cast<std::int64_t>(o) * kdim;
    const std::int32_t correction = q.bias_int[o] - zp_in * q.wsum[o];
    std::int32_t* orow = out.data() + static_cast<std::int64_t>(o) * ncols;
    for (std::int64_t p = 0; p < ncols; ++p) {
      std::int32_t acc = dot_i8(wrow, scratch.data() + p * kdim, kdim) + correction;
      orow[p] = q.requant[o].apply(acc);
    }
  }
}

void finalize_relu(const std::vector<std::int32_t>& units, int zp_out, I8Plane& out) {
  out.data.resize(units.size());
  for (size_t i = 0; i < units.size(); ++i) out.data[i] = sat8(units[i] + zp_out);
}

void maxpool_i8(const I8Plane& x, I8Plane& y) {
  y.c = x.c;
  y.h = (x.h + 2 - 3) / 2 + 1;
  y.w = (x.w + 2 - 3) / 2 + 1;
  y.data.resize(static_cast<size_t>(y.c) * y.h * y.w);
  for (int ic = 0; ic < x.c; ++ic) {
    const std::int8_t* xp = x.data.data() + static_cast<std::int64_t>(ic) * x.h * x.w;
    std::int8_t* yp = y.data.data() + static_cast<std::int64_t>(ic) * y.h * y.w;
    for (int yo = 0; yo < y.h; ++yo) {
      for (int xo = 0; xo < y.w; ++xo) {
        std::int8_t best = -128;
        bool any = false;
        for (int kh = 0; kh < 3; ++kh) {
          int iy = yo * 2 + kh - 1;
          if (iy < 0 || iy >= x.h) continue;
          for (int kw = 0; kw < 3; ++kw) {
            int ix = xo * 2 + kw - 1;
            if (ix < 0 || ix >= x.w) continue;
            best = any ? std::max(best, xp[iy * x.w + ix]) : xp[iy * x.w + ix];
            any = true;
          }
        }
        yp[yo * y.w + xo] = best;
      }
    }
  }
}

}  // namespace

Tensor4 QuantizedModel::forward(const Tensor4& batch) const {
  if (batch.c != Model::kInputChannels || batch.h != config.crop || batch.w != config.crop)
    throw shape_error("quantized forward: input " + batch.shape_str() + " but expected Nx2x" +
                      std::to_string(config.crop) + "x" + std::to_string(config.crop));
  const int grid = config.grid();
  Tensor4 logits(batch.n, config.head_channels(), grid, grid);

  parallel_for(batch.n, 1, [&](std::int64_t n0, std::int64_t n1) {
    std::vector<std::int8_t> scratch;
    std::vector<std::int32_t> units, shortcut_units;
    for (std::int64_t in = n0; in < n1; ++in) {
      // Quantize the float input (symmetric, zero point 0).
      I8Plane x;
      x.c = batch.c;
      x.h = batch.h;
      x.w = batch.w;
      x.data.resize(static_cast<size_t>(x.c) * x.h * x.w);
      const float* src = batch.sample(static_cast<int>(in));
      for (size_t i = 0; i < x.data.size(); ++i) x.data[i] = q_input.quantize(src[i]);

      int oh = 0, ow = 0;
      conv_to_out_units(stem, x, q_input.zero_point, units, oh, ow, scratch);
      I8Plane act;
      act.c = stem.out_c;
      act.h = oh;
      act.w = ow;
      finalize_relu(units, q_stem.zero_point, act);
      I8Plane pooled;
      maxpool_i8(act, pooled);
      I8Plane cur = std::move(pooled);
      int zp_cur = q_stem.zero_point;

      for (const auto& b : blocks) {
        conv_to_out_units(b.conv1, cur, zp_cur, units, oh, ow, scratch);
        I8Plane mid;
        mid.c = b.conv1.out_c;
        mid.h = oh;
        mid.w = ow;
        finalize_relu(units, b.q_mid.zero_point, mid);

        conv_to_out_units(b.conv2, mid, b.q_mid.zero_point, units, oh, ow, scratch);

        if (b.proj) {
          int poh = 0, pow_ = 0;
          conv_to_out_units(*b.proj, cur, zp_cur, shortcut_units, poh, pow_, scratch);
        } else {
          shortcut_units.resize(cur.data.size());
          for (size_t i = 0; i < cur.data.size(); ++i)
            shortcut_units[i] = b.shortcut_scale.apply(cur.data[i] - zp_cur);
        }

        I8Plane next;
        next.c = b.conv2.out_c;
        next.h = oh;
        next.w = ow;
        next.data.resize(units.size());
        for (size_t i = 0; i < units.size(); ++i)
          next.data[i] = sat8(units[i] + shortcut_units[i] + b.q_out.zero_point);
        cur = std::move(next);
        zp_cur = b.q_out.zero_point;
      }

      // Head stays in f32.
      const int kdim = head.in_c;
      const std::int64_t ncols = static_cast<std::int64_t>(cur.h) * cur.w;
      scratch.resize(static_cast<size_t>(ncols) * kdim);
      im2col_i8(cur.data.data(), cur.c, cur.h, cur.w, 1, 1, 0, cur.h, cur.w,
                static_cast<std::int8_t>(zp_cur), scratch.data());
      float* out = logits.sample(static_cast<int>(in));
      for (int o = 0; o < head.out_c; ++o) {
        const std::int8_t* wrow = head.weight.data() + static_cast<std::int64_t>(o) * kdim;
        const double s = static_cast<double>(q_head_in.scale) * head.wscale[o];
        for (std::int64_t p = 0; p < ncols; ++p) {
          std::int32_t acc = dot_i8(wrow, scratch.data() + p * kdim, kdim) - zp_cur * head.wsum[o];
          out[static_cast<std::int64_t>(o) * ncols + p] =
              static_cast<float>(s * acc + head.bias[o]);
        }
      }
    }
  });
  return logits;
}

}  // namespace sardet
