// SPDX-License-Identifier: Apache-2.0
#include "sardet/tiling.hpp"

#include "sardet/errors.hpp"

namespace sardet {

std::vector<LabeledCrop> tile(const ComplexImage& scene_img,
                              const std::vector<SceneLabel>& labels,
                              int crop, int stride) {
  if (crop < 32 || crop % 32 != 0)
    throw param_error("tile: crop must be a positive multiple of 32, got " + std::to_string(crop));
  if (stride < 1 || stride > crop)
    throw param_error("tile: stride must be in [1, crop], got " + std::to_string(stride));
  if (crop > scene_img.height || crop > scene_img.width)
    throw param_error("tile: crop " + std::to_string(crop) + " exceeds scene " +
                      std::to_string(scene_img.height) + "x" + std::to_string(scene_img.width));

  std::vector<LabeledCrop> crops;
  for (int r0 = 0; r0 + crop <= scene_img.height; r0 += stride) {
    for (int c0 = 0; c0 + crop <= scene_img.width; c0 += stride) {
      LabeledCrop lc;
      lc.origin_row = r0;
      lc.origin_col = c0;
      lc.image = ComplexImage(crop, crop, scene_img.domain);
      for (int r = 0; r < crop; ++r)
        for (int c = 0; c < crop; ++c) lc.image.at(r, c) = scene_img.at(r0 + r, c0 + c);
      for (const auto& label : labels) {
        float lx = label.x - static_cast<float>(c0);
        float ly = label.y - static_cast<float>(r0);
        if (lx >= 0.0f && lx < static_cast<float>(crop) && ly >= 0.0f && ly < static_cast<float>(crop)) {
          SceneLabel local = label;
          local.x = lx;
          local.y = ly;
          lc.labels.push_back(local);
        }
      }
      crops.push_back(std::move(lc));
    }
  }
  return crops;
}

}  // namespace sardet
