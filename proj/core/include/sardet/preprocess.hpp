// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "sardet/chirp.hpp"
#include "sardet/image.hpp"
#include "sardet/scene.hpp"

namespace sardet {

/// Matched-filters every azimuth line with the conjugate time-reversed
/// chirp via a zero-padded FFT. Output has the input's size; bin u holds
/// the correlation at lag u, so a noiseless echo starting at bin r peaks
/// exactly at r (the label-space coordinate) with magnitude amplitude*L.
/// Requires Domain::raw input.
ComplexImage range_compress(const ComplexImage& img, const ChirpParams& chirp);

/// Shifts every row by floor(L/2) toward lower range indices, moving the
/// echo's leading edge back onto its center. Afterwards a point target's
/// raw energy centroid sits within one bin of its label-space range
/// coordinate. Vacated bins are zero-filled, shifted-out bins dropped.
/// Requires Domain::raw input; floor(L/2) >= width is a parameter error.
ComplexImage half_chirp_shift(const ComplexImage& img, const ChirpParams& chirp);

/// Integer (delta_row, delta_col) displacement between feature and label
/// pixel spaces, queryable at any pixel of the parent scene.
using OffsetMap = std::function<std::pair<int, int>(int row, int col)>;

struct OffsetCorrection {
  std::vector<SceneLabel> labels;  // translated, still crop-local
  int dropped = 0;                 // labels pushed outside the crop
};

/// Applies the offset sampled at the crop's center pixel to every label
/// of the crop: x += delta_col, y += delta_row. Labels leaving the
/// [0, crop) window are dropped and counted, not an error.
OffsetCorrection iw_offset_correct(const std::vector<SceneLabel>& crop_labels,
                                   int crop_origin_row, int crop_origin_col,
                                   int crop, const OffsetMap& offset_map);

}  // namespace sardet
