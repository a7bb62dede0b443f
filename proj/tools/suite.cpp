// SPDX-License-Identifier: Apache-2.0
#include "suite.hpp"

#include <cmath>

#include "sardet/errors.hpp"
#include "sardet/preprocess.hpp"
#include "sardet/rng.hpp"
#include "sardet/tiling.hpp"

namespace sardet::cli {

void SuiteSpec::validate() const {
  if (mode != "stripmap" && mode != "iw")
    throw param_error("suite: mode must be stripmap or iw, got " + mode);
  if (scenes_train < 0 || scenes_val < 0 || scenes_test < 0)
    throw param_error("suite: scene counts must be >= 0");
  if (crop < 32 || crop % 32 != 0) throw param_error("suite: crop must be a multiple of 32");
  if (scene_height < crop || scene_width < crop)
    throw param_error("suite: scene smaller than crop");
  if (targets_min < 0 || targets_max < targets_min)
    throw param_error("suite: bad targets_min/targets_max");
  if (!(amplitude_min > 0.0) || amplitude_max < amplitude_min)
    throw param_error("suite: bad amplitude range");
  if (windmill_fraction < 0.0 || windmill_fraction > 1.0)
    throw param_error("suite: windmill_fraction must be in [0, 1]");
  if (chirp_samples < 1) throw param_error("suite: chirp_samples must be >= 1");
}

SuiteSpec SuiteSpec::from_config(const KeyValueConfig& cfg) {
  SuiteSpec s;
  auto key = [](const std::string& k) { return "simulate." + k; };
  s.mode = cfg.get_string(key("mode"), s.mode);
  s.scenes_train = static_cast<int>(cfg.get_int(key("scenes_train"), s.scenes_train));
  s.scenes_val = static_cast<int>(cfg.get_int(key("scenes_val"), s.scenes_val));
  s.scenes_test = static_cast<int>(cfg.get_int(key("scenes_test"), s.scenes_test));
  s.scene_height = static_cast<int>(cfg.get_int(key("scene_height"), s.scene_height));
  s.scene_width = static_cast<int>(cfg.get_int(key("scene_width"), s.scene_width));
  s.chirp_samples = static_cast<int>(cfg.get_int(key("chirp_samples"), s.chirp_samples));
  s.noise_sigma = cfg.get_double(key("noise_sigma"), s.noise_sigma);
  s.clutter_sigma = cfg.get_double(key("clutter_sigma"), s.clutter_sigma);
  s.azimuth_extent = static_cast<int>(cfg.get_int(key("azimuth_extent"), s.azimuth_extent));
  s.targets_min = static_cast<int>(cfg.get_int(key("targets_min"), s.targets_min));
  s.targets_max = static_cast<int>(cfg.get_int(key("targets_max"), s.targets_max));
  s.amplitude_min = cfg.get_double(key("amplitude_min"), s.amplitude_min);
  s.amplitude_max = cfg.get_double(key("amplitude_max"), s.amplitude_max);
  s.windmill_fraction = cfg.get_double(key("windmill_fraction"), s.windmill_fraction);
  s.crop = static_cast<int>(cfg.get_int(key("crop"), s.crop));
  s.stride = static_cast<int>(cfg.get_int(key("stride"), s.crop));
  s.min_separation = static_cast<int>(cfg.get_int(key("min_separation"), s.min_separation));
  s.offset_drow = static_cast<int>(cfg.get_int(key("offset_drow"), 0));
  s.offset_dcol = static_cast<int>(cfg.get_int(key("offset_dcol"), 0));
  s.near_shore = cfg.get_bool(key("near_shore"), false);
  s.seed = static_cast<std::uint64_t>(cfg.get_int(key("seed"), 1));
  s.validate();
  return s;
}

namespace {

SceneSpec random_scene(const SuiteSpec& spec, Rng& rng) {
  SceneSpec scene;
  scene.height = spec.scene_height;
  scene.width = spec.scene_width;
  scene.noise_sigma = spec.noise_sigma;
  scene.clutter_sigma = spec.clutter_sigma;
  scene.azimuth_extent = spec.azimuth_extent;
  scene.near_shore = spec.near_shore;
  scene.rng_seed = rng.next_u64();

  const int half = spec.chirp_samples / 2;
  // Keep the raw echo (and its shifted/windmill variants) inside the
  // scene so labels stay exact.
  const int col_lo = half + 6;
  const int col_hi = spec.scene_width - spec.chirp_samples - 6;
  const int row_margin = spec.azimuth_extent + 2;
  const int row_lo = row_margin;
  const int row_hi = spec.scene_height - 1 - row_margin;
  if (col_hi <= col_lo || row_hi <= row_lo)
    throw param_error("suite: scene too small for the chirp/extent margins");

  const int wanted = static_cast<int>(rng.uniform_int(spec.targets_min, spec.targets_max));
  int attempts = 0;
  while (static_cast<int>(scene.targets.size()) < wanted && attempts < wanted * 60) {
    ++attempts;
    TargetSpec t;
    t.range_px = static_cast<int>(rng.uniform_int(col_lo, col_hi));
    t.azimuth_px = static_cast<int>(rng.uniform_int(row_lo, row_hi));
    t.amplitude = rng.uniform(spec.amplitude_min, spec.amplitude_max);
    t.cls = rng.uniform() < spec.windmill_fraction ? TargetClass::windmill : TargetClass::ship;
    bool ok = true;
    for (const auto& other : scene.targets) {
      double d = std::hypot(static_cast<double>(t.range_px - other.range_px),
                            static_cast<double>(t.azimuth_px - other.azimuth_px));
      if (d < spec.min_separation) {
        ok = false;
        break;
      }
    }
    if (ok) scene.targets.push_back(t);
  }
  return scene;
}

}  // namespace

SuiteCounts build_split(const SuiteSpec& spec, int scene_id_base, int n_scenes,
                        const std::string& out_dir) {
  spec.validate();
  SuiteCounts counts;
  ChirpParams chirp = ChirpParams::from_length(spec.chirp_samples);
  Rng suite_rng = Rng(spec.seed).fork(static_cast<std::uint64_t>(scene_id_base));
  std::vector<LabeledCrop> all_crops;

  for (int i = 0; i < n_scenes; ++i) {
    SceneSpec scene = random_scene(spec, suite_rng);
    Simulation sim = simulate_raw(scene, chirp);
    counts.truncated += sim.truncated_echoes;

    ComplexImage processed;
    std::vector<SceneLabel> labels = sim.labels;
    if (spec.mode == "stripmap") {
      processed = half_chirp_shift(sim.raw, chirp);
    } else {
      processed = range_compress(sim.raw, chirp);
      // Feature and label grids are offset against each other; stash the
      // labels in the displaced frame, the per-crop correction undoes it.
      for (auto& l : labels) {
        l.x -= static_cast<float>(spec.offset_dcol);
        l.y -= static_cast<float>(spec.offset_drow);
      }
    }

    auto crops = tile(processed, labels, spec.crop, spec.stride);
    for (auto& crop : crops) {
      crop.scene_id = scene_id_base + i;
      if (spec.mode == "iw" && (spec.offset_drow != 0 || spec.offset_dcol != 0)) {
        OffsetMap map = [&](int, int) { return std::make_pair(spec.offset_drow, spec.offset_dcol); };
        auto corrected =
            iw_offset_correct(crop.labels, crop.origin_row, crop.origin_col, spec.crop, map);
        counts.dropped_by_offset += corrected.dropped;
        crop.labels = std::move(corrected.labels);
      }
      for (const auto& l : crop.labels)
        (l.cls == TargetClass::ship ? counts.ships : counts.windmills)++;
    }
    all_crops.insert(all_crops.end(), std::make_move_iterator(crops.begin()),
                     std::make_move_iterator(crops.end()));
    ++counts.scenes;
  }
  counts.crops = static_cast<int>(all_crops.size());
  write_dataset(all_crops, spec.n_classes(), out_dir);
  return counts;
}

}  // namespace sardet::cli
