// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sardet/config.hpp"
#include "sardet/dataset.hpp"
#include "sardet/scene.hpp"

namespace sardet::cli {

/// Synthetic scene-suite recipe driving `simulate`. One seeded recipe
/// expands deterministically into train/val/test datasets.
struct SuiteSpec {
  std::string mode = "stripmap";  // stripmap | iw
  int scenes_train = 9;
  int scenes_val = 1;
  int scenes_test = 2;
  int scene_height = 512;
  int scene_width = 512;
  int chirp_samples = 64;
  double noise_sigma = 0.25;
  double clutter_sigma = 0.10;
  int azimuth_extent = 17;
  int targets_min = 2;
  int targets_max = 12;
  double amplitude_min = 2.0;
  double amplitude_max = 5.0;
  double windmill_fraction = 0.0;  // > 0 enables 2-class labels
  int crop = 128;
  int stride = 128;
  int min_separation = 70;  // px between target centers
  int offset_drow = 0;      // iw: feature-vs-label displacement
  int offset_dcol = 0;
  bool near_shore = false;
  std::uint64_t seed = 1;

  int n_classes() const { return windmill_fraction > 0.0 ? 2 : 0; }
  void validate() const;

  static SuiteSpec from_config(const KeyValueConfig& cfg);
};

struct SuiteCounts {
  int scenes = 0;
  int crops = 0;
  int ships = 0;
  int windmills = 0;
  int truncated = 0;
  int dropped_by_offset = 0;
};

/// Generates one split ("train" / "val" / "test") into out_dir. Scene
/// ids are globally unique across splits so evaluation can group crops.
SuiteCounts build_split(const SuiteSpec& spec, int scene_id_base, int n_scenes,
                        const std::string& out_dir);

}  // namespace sardet::cli
