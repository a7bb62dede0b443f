// SPDX-License-Identifier: Apache-2.0
#include "sardet/nms.hpp"

#include <algorithm>
#include <cmath>

namespace sardet {

double detection_iou(const Detection& a, const Detection& b) {
  const double side = Detection::kBoxSide;
  double ix = std::max(0.0, side - std::abs(static_cast<double>(a.x) - b.x));
  double iy = std::max(0.0, side - std::abs(static_cast<double>(a.y) - b.y));
  double inter = ix * iy;
  double uni = 2.0 * side * side - inter;
  return inter / uni;
}

std::vector<Detection> nms(std::vector<Detection> detections, double iou_threshold) {
  std::sort(detections.begin(), detections.end(), [](const Detection& a, const Detection& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.x != b.x) return a.x < b.x;
    return a.y < b.y;
  });
  std::vector<Detection> kept;
  for (const auto& d : detections) {
    bool suppressed = false;
    for (const auto& k : kept) {
      if (detection_iou(d, k) > iou_threshold) {
        suppressed = true;
        break;
      }
    }
    if (!suppressed) kept.push_back(d);
  }
  return kept;
}

}  // namespace sardet
