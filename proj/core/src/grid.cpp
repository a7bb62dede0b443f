// SPDX-License-Identifier: Apache-2.0
#include "sardet/grid.hpp"

#include <cmath>

namespace sardet {

namespace {
constexpr int kCellPx = 32;
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

double logit(double p) { return std::log(p / (1.0 - p)); }

GridTarget::GridTarget(int grid_, int n_classes_)
    : grid(grid_),
      n_classes(n_classes_),
      objectness(static_cast<size_t>(grid_) * grid_, 0),
      tx(static_cast<size_t>(grid_) * grid_, 0.0f),
      ty(static_cast<size_t>(grid_) * grid_, 0.0f),
      cls(static_cast<size_t>(grid_) * grid_, -1) {
  if (grid_ < 1) throw param_error("GridTarget: grid must be >= 1");
}

EncodeResult encode_targets(const std::vector<SceneLabel>& labels, int crop, int n_classes) {
  if (crop < kCellPx || crop % kCellPx != 0)
    throw param_error("encode_targets: crop must be a positive multiple of 32");
  const int grid = crop / kCellPx;
  EncodeResult res;
  res.target = GridTarget(grid, n_classes);
  // Amplitude of the label currently holding each cell; NaN marks free.
  std::vector<float> holder(static_cast<size_t>(grid) * grid,
                            -std::numeric_limits<float>::infinity());
  std::vector<bool> occupied(static_cast<size_t>(grid) * grid, false);
  for (const auto& label : labels) {
    if (label.x < 0.0f || label.x >= static_cast<float>(crop) || label.y < 0.0f ||
        label.y >= static_cast<float>(crop))
      throw param_error("encode_targets: label (" + std::to_string(label.x) + ", " +
                        std::to_string(label.y) + ") outside crop " + std::to_string(crop));
    int col = static_cast<int>(label.x) / kCellPx;
    int row = static_cast<int>(label.y) / kCellPx;
    int at = res.target.idx(row, col);
    if (occupied[at]) {
      ++res.collisions;
      // Larger amplitude evicts; unknown amplitudes (< 0) never evict.
      if (!(label.amplitude > holder[at])) continue;
    }
    occupied[at] = true;
    holder[at] = label.amplitude;
    res.target.objectness[at] = 1;
    res.target.tx[at] = label.x / kCellPx - static_cast<float>(col);
    res.target.ty[at] = label.y / kCellPx - static_cast<float>(row);
    res.target.cls[at] = n_classes > 0 ? static_cast<std::int8_t>(label.cls) : -1;
  }
  return res;
}

std::vector<Detection> decode(const Tensor4& logits, int sample, int origin_row, int origin_col,
                              double threshold, int n_classes) {
  if (threshold < 0.0 || threshold > 1.0)
    throw param_error("decode: threshold must be in [0, 1]");
  if (logits.c != 3 + n_classes)
    throw shape_error("decode: logits " + logits.shape_str() + " but expected " +
                      std::to_string(3 + n_classes) + " channels");
  if (logits.h != logits.w) throw shape_error("decode: grid must be square");
  const int grid = logits.h;
  std::vector<Detection> out;
  for (int row = 0; row < grid; ++row) {
    for (int col = 0; col < grid; ++col) {
      double obj = sigmoid(logits.at(sample, 2, row, col));
      if (obj < threshold) continue;
      Detection d;
      d.x = static_cast<float>(origin_col + (col + sigmoid(logits.at(sample, 0, row, col))) * kCellPx);
      d.y = static_cast<float>(origin_row + (row + sigmoid(logits.at(sample, 1, row, col))) * kCellPx);
      d.score = static_cast<float>(obj);
      if (n_classes > 0) {
        int best = 0;
        float best_v = logits.at(sample, 3, row, col);
        for (int k = 1; k < n_classes; ++k) {
          float v = logits.at(sample, 3 + k, row, col);
          if (v > best_v) {
            best_v = v;
            best = k;
          }
        }
        d.cls = static_cast<TargetClass>(best);
      }
      out.push_back(d);
    }
  }
  return out;
}

}  // namespace sardet
