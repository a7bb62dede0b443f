// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "sardet/image.hpp"
#include "sardet/scene.hpp"

namespace sardet {

/// One network input: a crop x crop window of a scene plus crop-local
/// labels and the window's origin in the parent image.
struct LabeledCrop {
  ComplexImage image;
  std::vector<SceneLabel> labels;  // coordinates in [0, crop)
  int origin_row = 0;
  int origin_col = 0;
  int scene_id = 0;
};

/// Deterministic raster-order tiling. A label lands in every crop whose
/// window contains it; partial tiles at the borders are discarded.
/// crop must be a positive multiple of 32, stride in [1, crop], and the
/// crop no larger than the scene.
std::vector<LabeledCrop> tile(const ComplexImage& scene_img,
                              const std::vector<SceneLabel>& labels,
                              int crop, int stride);

}  // namespace sardet
