// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

namespace sardet {

/// One validation detection: its score and whether it matched a label.
struct ScoredFlag {
  float score = 0.0f;
  bool is_tp = false;
};

struct RocPoint {
  double threshold = 0.0;
  double tpr = 0.0;
  double fpr = 0.0;
};

struct ThresholdChoice {
  double threshold = 0.5;      // floor(min(t_J, t_D) * 100) / 100
  double youden = 0.5;         // argmax TPR - FPR
  double min_distance = 0.5;   // argmin dist to (FPR 0, TPR 1)
  bool degenerate = false;     // no positives or no negatives seen
};

/// Picks the acceptance threshold from ROC points: the lower of the
/// Youden J and minimum-distance thresholds, floored to two decimals.
/// Ties prefer the highest qualifying threshold.
ThresholdChoice select_threshold_from_roc(const std::vector<RocPoint>& roc);

/// Convenience path over flagged validation scores. Candidate
/// thresholds are the observed scores (plus 0 and 1, used only when no
/// observed score qualifies). total_positives / total_negatives default
/// to the flag counts; pass label and proxy-cell totals to reproduce the
/// evaluation-kit ROC denominators.
ThresholdChoice select_threshold(const std::vector<ScoredFlag>& flagged,
                                 std::int64_t total_positives = -1,
                                 std::int64_t total_negatives = -1);

}  // namespace sardet
