// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "sardet/grid.hpp"

namespace sardet {

/// IoU of the fixed 50 px boxes centered on two detections.
double detection_iou(const Detection& a, const Detection& b);

/// Greedy non-maximum suppression over fixed-size boxes: detections are
/// visited by (score desc, x asc, y asc); one is dropped when its IoU
/// with an already kept detection exceeds iou_threshold. The output
/// keeps that stable order.
std::vector<Detection> nms(std::vector<Detection> detections, double iou_threshold = 0.5);

}  // namespace sardet
