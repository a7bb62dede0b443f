// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sardet/matching.hpp"
#include "sardet/threshold.hpp"

namespace sardet {

/// Precision / recall / F1 under 30 px center-distance matching.
struct ScoreReport {
  double precision = 0.0;
  double recall = 0.0;
  double f1_30 = 0.0;
  int tp = 0, fp = 0, fn = 0;
  bool degenerate = false;  // no detections and no labels: F1 pinned to 1

  std::optional<double> ship_f1;
  std::optional<double> windmill_f1;
};

ScoreReport score(const MatchResult& m);

/// Restricts both sides to one class before matching, so a detection at
/// the right place with the wrong class counts against the class it
/// claimed only.
ScoreReport per_class_score(const std::vector<Detection>& detections,
                            const std::vector<SceneLabel>& labels, TargetClass cls,
                            double radius = 30.0);

/// Matches, scores, and fills the per-class entries when asked.
ScoreReport evaluate(const std::vector<Detection>& detections,
                     const std::vector<SceneLabel>& labels, int n_classes, double radius = 30.0);

/// ROC over score thresholds: detections are re-filtered and re-matched
/// per candidate threshold (the observed scores, with 0 and 1 as
/// sentinels). TPR = TP / #labels. Detection offers no true negatives,
/// so FPR uses non-object grid cells as a proxy denominator:
/// FPR = FP / (FP + non_object_cells), non_object_cells = total grid
/// cells in the evaluated crops minus #labels. Labels must be non-empty.
std::vector<RocPoint> roc(const std::vector<Detection>& scored_detections,
                          const std::vector<SceneLabel>& labels, double radius,
                          std::int64_t total_grid_cells);

/// Report text (`key = value` lines) and CSV row used by the CLI.
std::string report_text(const ScoreReport& r);
std::string report_csv_header();
std::string report_csv_row(const std::string& scene_id, const ScoreReport& r);

}  // namespace sardet
