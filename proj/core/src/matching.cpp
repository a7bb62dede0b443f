// SPDX-License-Identifier: Apache-2.0
#include "sardet/matching.hpp"

#include <algorithm>
#include <cmath>

namespace sardet {

MatchResult match(const std::vector<Detection>& detections,
                  const std::vector<SceneLabel>& labels, double radius) {
  if (!(radius > 0.0)) throw param_error("match: radius must be > 0");
  std::vector<MatchPair> pairs;
  for (int d = 0; d < static_cast<int>(detections.size()); ++d) {
    for (int l = 0; l < static_cast<int>(labels.size()); ++l) {
      double dist = std::hypot(static_cast<double>(detections[d].x) - labels[l].x,
                               static_cast<double>(detections[d].y) - labels[l].y);
      if (dist <= radius) pairs.push_back({d, l, dist});
    }
  }
  std::sort(pairs.begin(), pairs.end(), [](const MatchPair& a, const MatchPair& b) {
    if (a.distance != b.distance) return a.distance < b.distance;
    if (a.detection != b.detection) return a.detection < b.detection;
    return a.label < b.label;
  });

  MatchResult res;
  std::vector<bool> det_used(detections.size(), false);
  std::vector<bool> label_used(labels.size(), false);
  for (const auto& p : pairs) {
    if (det_used[p.detection] || label_used[p.label]) continue;
    det_used[p.detection] = true;
    label_used[p.label] = true;
    res.pairs.push_back(p);
  }
  for (int d = 0; d < static_cast<int>(detections.size()); ++d)
    if (!det_used[d]) res.unmatched_detections.push_back(d);
  for (int l = 0; l < static_cast<int>(labels.size()); ++l)
    if (!label_used[l]) res.unmatched_labels.push_back(l);
  return res;
}

}  // namespace sardet
