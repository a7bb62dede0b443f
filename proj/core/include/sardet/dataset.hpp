// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "sardet/tiling.hpp"

namespace sardet {

/// On-disk dataset: a directory of .sarc crop files plus manifest.txt
/// naming them one per line.
///
/// Crop file layout (little-endian):
///   "SARC" magic, u32 version = 1, u32 height, u32 width,
///   u8 domain_tag, u8 n_classes, u16 n_labels,
///   n_labels x { f32 x, f32 y, u8 class, 3 pad bytes },
///   height*width*2 f32 samples (real, imag interleaved, row-major).
///
/// Scene id and crop origin ride in the file name
/// (s<scene>_y<row>_x<col>.sarc) so files round-trip byte-identically.
struct Dataset {
  std::vector<LabeledCrop> crops;
  int n_classes = 0;
};

std::string crop_filename(const LabeledCrop& crop);

void write_crop_file(const LabeledCrop& crop, int n_classes, const std::string& path);
LabeledCrop read_crop_file(const std::string& path, int* n_classes_out);

/// Writes crops + manifest into dir (created if missing).
void write_dataset(const std::vector<LabeledCrop>& crops, int n_classes, const std::string& dir);

/// Reads the crops named by dir/manifest.txt (or, absent a manifest, all
/// *.sarc files in sorted order). An empty directory yields an empty
/// dataset. Malformed files raise format_error naming file and offset.
Dataset read_dataset(const std::string& dir);

}  // namespace sardet
