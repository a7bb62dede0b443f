// SPDX-License-Identifier: Apache-2.0
#include "inference.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

#include "sardet/errors.hpp"
#include "sardet/grid.hpp"

namespace sardet::cli {

Tensor4 crops_to_batch(const std::vector<LabeledCrop>& crops, const std::vector<int>& order,
                       int first, int count) {
  const int crop = crops[order[first]].image.height;
  Tensor4 batch(count, 2, crop, crop);
  for (int b = 0; b < count; ++b) {
    const auto& img = crops[order[first + b]].image;
    if (img.height != crop || img.width != crop)
      throw param_error("crops_to_batch: mixed crop sizes in dataset");
    float* re = batch.sample(b);
    float* im = re + static_cast<std::int64_t>(crop) * crop;
    for (size_t i = 0; i < img.data.size(); ++i) {
      re[i] = img.data[i].real();
      im[i] = img.data[i].imag();
    }
  }
  return batch;
}

std::map<int, SceneResult> infer_scenes(const ForwardFn& forward, const Dataset& dataset,
                                        double threshold, int batch_size, double nms_iou) {
  std::map<int, SceneResult> scenes;
  if (dataset.crops.empty()) return scenes;
  std::vector<int> order(dataset.crops.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);

  const int n = static_cast<int>(order.size());
  for (int first = 0; first < n; first += batch_size) {
    const int count = std::min(batch_size, n - first);
    Tensor4 batch = crops_to_batch(dataset.crops, order, first, count);
    Tensor4 logits = forward(batch);
    for (int b = 0; b < count; ++b) {
      const auto& crop = dataset.crops[order[first + b]];
      auto& scene = scenes[crop.scene_id];
      auto dets = decode(logits, b, crop.origin_row, crop.origin_col, threshold,
                         dataset.n_classes);
      scene.detections.insert(scene.detections.end(), dets.begin(), dets.end());
      scene.grid_cells += static_cast<std::int64_t>(logits.h) * logits.w;
      for (const auto& l : crop.labels) {
        SceneLabel g = l;
        g.x += static_cast<float>(crop.origin_col);
        g.y += static_cast<float>(crop.origin_row);
        scene.labels.push_back(g);
      }
    }
  }
  for (auto& [id, scene] : scenes) {
    scene.detections = nms(std::move(scene.detections), nms_iou);
    // Overlapping tilings list a label once per covering crop.
    std::set<std::tuple<float, float, int>> seen;
    std::vector<SceneLabel> unique;
    for (const auto& l : scene.labels)
      if (seen.insert({l.x, l.y, static_cast<int>(l.cls)}).second) unique.push_back(l);
    scene.labels = std::move(unique);
  }
  return scenes;
}

EvalSummary summarize(const std::map<int, SceneResult>& scenes, int n_classes, double radius) {
  EvalSummary summary;
  int tp = 0, fp = 0, fn = 0;
  std::vector<Detection> pooled_dets;
  std::vector<SceneLabel> pooled_labels;
  double spread = 0.0;
  for (const auto& [id, scene] : scenes) {
    ScoreReport r = evaluate(scene.detections, scene.labels, n_classes, radius);
    tp += r.tp;
    fp += r.fp;
    fn += r.fn;
    summary.per_scene.emplace_back(id, r);
    for (auto d : scene.detections) {
      d.x += static_cast<float>(spread);
      pooled_dets.push_back(d);
    }
    for (auto l : scene.labels) {
      l.x += static_cast<float>(spread);
      pooled_labels.push_back(l);
    }
    spread += 1e6;
  }
  ScoreReport& o = summary.overall;
  o.tp = tp;
  o.fp = fp;
  o.fn = fn;
  if (tp == 0 && fp == 0 && fn == 0) {
    o.precision = o.recall = o.f1_30 = 1.0;
    o.degenerate = true;
  } else {
    o.precision = (tp + fp) > 0 ? static_cast<double>(tp) / (tp + fp) : 0.0;
    o.recall = (tp + fn) > 0 ? static_cast<double>(tp) / (tp + fn) : 0.0;
    o.f1_30 =
        (o.precision + o.recall) > 0.0 ? 2.0 * o.precision * o.recall / (o.precision + o.recall) : 0.0;
  }
  if (n_classes > 0) {
    o.ship_f1 = per_class_score(pooled_dets, pooled_labels, TargetClass::ship, radius).f1_30;
    o.windmill_f1 =
        per_class_score(pooled_dets, pooled_labels, TargetClass::windmill, radius).f1_30;
  }
  return summary;
}

ThresholdChoice pick_threshold(const std::map<int, SceneResult>& scenes, double radius) {
  std::vector<Detection> pooled_dets;
  std::vector<SceneLabel> pooled_labels;
  std::int64_t cells = 0;
  double spread = 0.0;
  for (const auto& [id, scene] : scenes) {
    for (auto d : scene.detections) {
      d.x += static_cast<float>(spread);
      pooled_dets.push_back(d);
    }
    for (auto l : scene.labels) {
      l.x += static_cast<float>(spread);
      pooled_labels.push_back(l);
    }
    cells += scene.grid_cells;
    spread += 1e6;
  }
  if (pooled_labels.empty()) {
    ThresholdChoice c;
    c.degenerate = true;
    return c;
  }
  auto points = roc(pooled_dets, pooled_labels, radius, cells);
  return select_threshold_from_roc(points);
}

void write_detections(const std::map<int, SceneResult>& scenes, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw format_error("cannot write detections file: " + path, 0);
  char buf[128];
  for (const auto& [id, scene] : scenes) {
    out << "# scene " << id << "\n";
    for (const auto& d : scene.detections) {
      std::snprintf(buf, sizeof(buf), "%.3f %.3f %.6f %s\n", d.x, d.y, d.score,
                    class_name(d.cls));
      out << buf;
    }
  }
}

std::map<int, std::vector<Detection>> read_detections(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw format_error("cannot read detections file: " + path, 0);
  std::map<int, std::vector<Detection>> scenes;
  int scene = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::sscanf(line.c_str(), "# scene %d", &scene);
      continue;
    }
    char cls[32] = {0};
    Detection d;
    if (std::sscanf(line.c_str(), "%f %f %f %31s", &d.x, &d.y, &d.score, cls) != 4)
      throw format_error(path + ": bad detection line: " + line, 0);
    d.cls = class_from_name(cls);
    scenes[scene].push_back(d);
  }
  return scenes;
}

}  // namespace sardet::cli
