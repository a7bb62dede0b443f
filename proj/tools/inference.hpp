// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "sardet/dataset.hpp"
#include "sardet/nms.hpp"
#include "sardet/scoring.hpp"
#include "sardet/tensor.hpp"

namespace sardet::cli {

using ForwardFn = std::function<Tensor4(const Tensor4&)>;

/// Copies crops into a 2-channel batch tensor (real, imaginary planes).
Tensor4 crops_to_batch(const std::vector<LabeledCrop>& crops, const std::vector<int>& order,
                       int first, int count);

/// Everything needed to score one scene: global post-NMS detections,
/// global labels, and the number of grid cells evaluated (the
/// true-negative proxy for ROC work).
struct SceneResult {
  std::vector<Detection> detections;
  std::vector<SceneLabel> labels;
  std::int64_t grid_cells = 0;
};

/// Decode -> per-scene merge -> NMS across the whole dataset.
std::map<int, SceneResult> infer_scenes(const ForwardFn& forward, const Dataset& dataset,
                                        double threshold, int batch_size = 16,
                                        double nms_iou = 0.5);

struct EvalSummary {
  ScoreReport overall;  // pooled over scenes
  std::vector<std::pair<int, ScoreReport>> per_scene;
};

EvalSummary summarize(const std::map<int, SceneResult>& scenes, int n_classes,
                      double radius = 30.0);

/// Youden-J / min-distance threshold from a validation inference pass
/// (run at threshold 0). Scenes are spread far apart on a common plane
/// so one ROC matching covers them all.
ThresholdChoice pick_threshold(const std::map<int, SceneResult>& scenes, double radius = 30.0);

/// Detection export: `x y score class_name` lines, scenes introduced by
/// `# scene <id>` comments.
void write_detections(const std::map<int, SceneResult>& scenes, const std::string& path);
std::map<int, std::vector<Detection>> read_detections(const std::string& path);

}  // namespace sardet::cli
