// SPDX-License-Identifier: Apache-2.0
#include "sardet/scoring.hpp"

#include <algorithm>
#include <cstdio>

namespace sardet {

ScoreReport score(const MatchResult& m) {
  ScoreReport r;
  r.tp = m.tp();
  r.fp = m.fp();
  r.fn = m.fn();
  if (r.tp == 0 && r.fp == 0 && r.fn == 0) {
    // Empty scene with no detections: scored perfect, flagged so that
    // averaging code can tell.
    r.precision = r.recall = r.f1_30 = 1.0;
    r.degenerate = true;
    return r;
  }
  r.precision = (r.tp + r.fp) > 0 ? static_cast<double>(r.tp) / (r.tp + r.fp) : 0.0;
  r.recall = (r.tp + r.fn) > 0 ? static_cast<double>(r.tp) / (r.tp + r.fn) : 0.0;
  r.f1_30 = (r.precision + r.recall) > 0.0
                ? 2.0 * r.precision * r.recall / (r.precision + r.recall)
                : 0.0;
  return r;
}

ScoreReport per_class_score(const std::vector<Detection>& detections,
                            const std::vector<SceneLabel>& labels, TargetClass cls,
                            double radius) {
  std::vector<Detection> d;
  std::vector<SceneLabel> l;
  for (const auto& det : detections)
    if (det.cls == cls) d.push_back(det);
  for (const auto& label : labels)
    if (label.cls == cls) l.push_back(label);
  return score(match(d, l, radius));
}

ScoreReport evaluate(const std::vector<Detection>& detections,
                     const std::vector<SceneLabel>& labels, int n_classes, double radius) {
  ScoreReport r = score(match(detections, labels, radius));
  if (n_classes > 0) {
    r.ship_f1 = per_class_score(detections, labels, TargetClass::ship, radius).f1_30;
    r.windmill_f1 = per_class_score(detections, labels, TargetClass::windmill, radius).f1_30;
  }
  return r;
}

std::vector<RocPoint> roc(const std::vector<Detection>& scored_detections,
                          const std::vector<SceneLabel>& labels, double radius,
                          std::int64_t total_grid_cells) {
  if (labels.empty()) throw param_error("roc: undefined without labels");
  for (const auto& d : scored_detections)
    if (d.score < 0.0f || d.score > 1.0f) throw param_error("roc: scores must be in [0, 1]");
  const std::int64_t non_object_cells =
      std::max<std::int64_t>(0, total_grid_cells - static_cast<std::int64_t>(labels.size()));

  std::vector<double> thresholds;
  for (const auto& d : scored_detections) thresholds.push_back(d.score);
  thresholds.push_back(0.0);
  thresholds.push_back(1.0);
  std::sort(thresholds.begin(), thresholds.end());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());

  std::vector<RocPoint> points;
  for (double t : thresholds) {
    std::vector<Detection> kept;
    for (const auto& d : scored_detections)
      if (d.score >= t) kept.push_back(d);
    MatchResult m = match(kept, labels, radius);
    RocPoint p;
    p.threshold = t;
    p.tpr = static_cast<double>(m.tp()) / static_cast<double>(labels.size());
    double denom = static_cast<double>(m.fp()) + static_cast<double>(non_object_cells);
    p.fpr = denom > 0.0 ? static_cast<double>(m.fp()) / denom : 0.0;
    points.push_back(p);
  }
  return points;
}

std::string report_text(const ScoreReport& r) {
  char buf[512];
  std::snprintf(buf, sizeof(buf),
                "tp = %d\nfp = %d\nfn = %d\nprecision = %.6f\nrecall = %.6f\nf1_30 = %.6f\n", r.tp,
                r.fp, r.fn, r.precision, r.recall, r.f1_30);
  std::string out = buf;
  if (r.ship_f1) {
    std::snprintf(buf, sizeof(buf), "ship_f1_30 = %.6f\n", *r.ship_f1);
    out += buf;
  }
  if (r.windmill_f1) {
    std::snprintf(buf, sizeof(buf), "windmill_f1_30 = %.6f\n", *r.windmill_f1);
    out += buf;
  }
  if (r.degenerate) out += "degenerate = true\n";
  return out;
}

std::string report_csv_header() {
  return "scene_id,tp,fp,fn,precision,recall,f1_30,ship_f1,windmill_f1";
}

std::string report_csv_row(const std::string& scene_id, const ScoreReport& r) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), "%s,%d,%d,%d,%.6f,%.6f,%.6f,%.6f,%.6f", scene_id.c_str(), r.tp,
                r.fp, r.fn, r.precision, r.recall, r.f1_30, r.ship_f1 ? *r.ship_f1 : -1.0,
                r.windmill_f1 ? *r.windmill_f1 : -1.0);
  return buf;
}

}  // namespace sardet
