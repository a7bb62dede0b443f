// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "sardet/scene.hpp"
#include "sardet/tensor.hpp"

namespace sardet {

/// Per-cell training target on the S x S grid: objectness plus the
/// target center's offset inside its 32 px cell, and the class when
/// classification is enabled. At most one target per cell.
struct GridTarget {
  int grid = 0;       // cells per side
  int n_classes = 0;  // 0 or 2
  std::vector<std::uint8_t> objectness;  // grid*grid
  std::vector<float> tx, ty;             // valid where objectness = 1
  std::vector<std::int8_t> cls;          // -1 where unset

  GridTarget() = default;
  GridTarget(int grid_, int n_classes_);
  int idx(int row, int col) const { return row * grid + col; }
};

/// Decoded detection in global scene pixels. Every detection carries the
/// fixed 50 px box, attached at post-processing.
struct Detection {
  float x = 0.0f;
  float y = 0.0f;
  float score = 0.0f;
  TargetClass cls = TargetClass::ship;

  static constexpr float kBoxSide = 50.0f;
};

struct EncodeResult {
  GridTarget target;
  int collisions = 0;  // labels displaced by a stronger cell occupant
};

/// Maps crop-local labels onto grid cells: cell (floor(x/32), floor(y/32))
/// becomes positive with tx = frac(x/32), ty = frac(y/32). When two
/// labels land in one cell the larger amplitude wins (first in order if
/// amplitudes are unknown). Labels outside [0, crop) are parameter errors.
EncodeResult encode_targets(const std::vector<SceneLabel>& labels, int crop, int n_classes);

/// Emits one detection per cell whose objectness sigmoid clears the
/// threshold: position (origin + (cell + sigmoid(t)) * 32), score
/// sigmoid(objectness), class argmax (ties to the lower index).
/// `sample` selects the batch row of `logits`.
std::vector<Detection> decode(const Tensor4& logits, int sample, int origin_row, int origin_col,
                              double threshold, int n_classes);

double sigmoid(double x);
double logit(double p);

}  // namespace sardet
