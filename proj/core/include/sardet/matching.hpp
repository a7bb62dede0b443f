// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "sardet/grid.hpp"
#include "sardet/scene.hpp"

namespace sardet {

struct MatchPair {
  int detection = 0;
  int label = 0;
  double distance = 0.0;
};

struct MatchResult {
  std::vector<MatchPair> pairs;           // each side used at most once
  std::vector<int> unmatched_detections;  // false positives
  std::vector<int> unmatched_labels;      // false negatives

  int tp() const { return static_cast<int>(pairs.size()); }
  int fp() const { return static_cast<int>(unmatched_detections.size()); }
  int fn() const { return static_cast<int>(unmatched_labels.size()); }
};

/// Greedy center-distance matching: all (detection, label) pairs within
/// `radius` pixels are taken in ascending distance order (ties by
/// detection index, then label index), each side at most once.
MatchResult match(const std::vector<Detection>& detections,
                  const std::vector<SceneLabel>& labels, double radius = 30.0);

}  // namespace sardet
