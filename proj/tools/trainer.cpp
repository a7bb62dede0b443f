// SPDX-License-Identifier: Apache-2.0
#include "trainer.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>

#include "inference.hpp"
#include "sardet/grid.hpp"
#include "sardet/optimizer.hpp"
#include "sardet/rng.hpp"

namespace sardet::cli {

TrainSpec TrainSpec::from_config(const KeyValueConfig& cfg) {
  TrainSpec s;
  std::string size = cfg.get_string("train.size", "S");
  if (size.size() != 1) throw param_error("train.size must be S, M or L");
  s.size_tag = size[0];
  s.crop = static_cast<int>(cfg.get_int("train.crop", s.crop));
  s.epochs = static_cast<int>(cfg.get_int("train.epochs", s.epochs));
  s.batch = static_cast<int>(cfg.get_int("train.batch", s.batch));
  s.lr = cfg.get_double("train.lr", s.lr);
  s.momentum = cfg.get_double("train.momentum", s.momentum);
  s.weight_decay = cfg.get_double("train.weight_decay", s.weight_decay);
  s.threshold_policy = cfg.get_string("train.threshold", "auto");
  s.loss.lambda_coord = cfg.get_double("train.lambda_coord", s.loss.lambda_coord);
  s.loss.lambda_noobj = cfg.get_double("train.lambda_noobj", s.loss.lambda_noobj);
  s.loss.lambda_class = cfg.get_double("train.lambda_class", s.loss.lambda_class);
  if (cfg.has("train.seeds")) {
    s.seeds.clear();
    for (const auto& part : split(cfg.get("train.seeds"), ','))
      s.seeds.push_back(static_cast<std::uint64_t>(std::stoull(part)));
    if (s.seeds.empty()) throw param_error("train.seeds must name at least one seed");
  }
  if (s.epochs < 1) throw param_error("train.epochs must be >= 1");
  if (s.batch < 2) throw param_error("train.batch must be >= 2 (batch statistics)");
  return s;
}

TrainOutcome train_one_seed(const TrainSpec& spec, std::uint64_t seed, const Dataset& train_set,
                            const Dataset* val_set, const std::string& checkpoint_path,
                            std::ostream& log, const std::string& resume_from) {
  if (train_set.crops.empty()) throw param_error("train: empty training dataset");
  const int crop = train_set.crops.front().image.height;
  if (crop != spec.crop)
    throw param_error("train: dataset crop " + std::to_string(crop) + " does not match model crop " +
                      std::to_string(spec.crop));

  ModelConfig config = ModelConfig::preset(spec.size_tag, spec.crop, train_set.n_classes);
  Model model(config, seed);
  int start_epoch = 0;
  if (!resume_from.empty()) {
    load_checkpoint_into(model, resume_from);
    start_epoch = static_cast<int>(model.meta.epochs);
  }
  model.meta.seed = seed;

  // Pre-encode every crop once.
  const int n = static_cast<int>(train_set.crops.size());
  std::vector<GridTarget> targets;
  targets.reserve(n);
  int collisions = 0;
  for (const auto& c : train_set.crops) {
    auto enc = encode_targets(c.labels, spec.crop, train_set.n_classes);
    collisions += enc.collisions;
    targets.push_back(std::move(enc.target));
  }
  if (collisions > 0) log << "note: " << collisions << " grid-cell label collisions\n";

  SgdMomentum sgd(model.parameters(), spec.momentum, spec.weight_decay);
  Rng shuffle_rng(seed * 0x9e37u + 17);
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;

  TrainOutcome outcome;
  for (int epoch = start_epoch; epoch < spec.epochs; ++epoch) {
    // Fisher-Yates with the portable generator keeps runs reproducible.
    for (int i = n - 1; i > 0; --i) {
      int j = static_cast<int>(shuffle_rng.uniform_int(0, i));
      std::swap(order[i], order[j]);
    }
    const double lr = cosine_lr(spec.lr, epoch, spec.epochs);
    double epoch_loss = 0.0;
    int batches = 0;
    for (int first = 0; first + spec.batch <= n; first += spec.batch) {
      Tensor4 batch = crops_to_batch(train_set.crops, order, first, spec.batch);
      std::vector<GridTarget> batch_targets;
      batch_targets.reserve(spec.batch);
      for (int b = 0; b < spec.batch; ++b) batch_targets.push_back(targets[order[first + b]]);
      Tensor4 logits = model.forward(batch, Mode::train);
      LossResult loss = detection_loss(logits, batch_targets, spec.loss);
      const float inv_b = 1.0f / static_cast<float>(spec.batch);
      for (auto& g : loss.dlogits.data) g *= inv_b;
      model.zero_grad();
      model.backward(loss.dlogits);
      sgd.step(lr);
      epoch_loss += loss.value / spec.batch;
      ++batches;
    }
    if (batches == 0) throw param_error("train: dataset smaller than one batch");
    epoch_loss /= batches;
    outcome.final_loss = epoch_loss;
    char line[160];
    std::snprintf(line, sizeof(line), "seed %llu epoch %d/%d lr %.5f loss %.5f\n",
                  static_cast<unsigned long long>(seed), epoch + 1, spec.epochs, lr, epoch_loss);
    log << line;
    model.meta.epochs = static_cast<std::uint32_t>(epoch + 1);
  }

  // Acceptance threshold: fixed, or Youden/min-distance on validation.
  double threshold = 0.5;
  if (spec.threshold_policy == "auto") {
    if (!val_set || val_set->crops.empty())
      throw param_error("train: threshold policy auto requires a validation set");
    auto forward = [&](const Tensor4& b) { return model.forward(b, Mode::eval); };
    auto scenes = infer_scenes(forward, *val_set, 0.0, spec.batch);
    ThresholdChoice choice = pick_threshold(scenes);
    if (choice.degenerate) log << "warning: degenerate validation ROC, threshold 0.5\n";
    threshold = choice.threshold;
  } else {
    threshold = std::stod(spec.threshold_policy);
    if (threshold < 0.0 || threshold > 1.0)
      throw param_error("train: fixed threshold must be in [0, 1]");
  }
  model.meta.threshold = static_cast<float>(threshold);
  outcome.threshold = threshold;

  if (val_set && !val_set->crops.empty()) {
    auto forward = [&](const Tensor4& b) { return model.forward(b, Mode::eval); };
    auto scenes = infer_scenes(forward, *val_set, threshold, spec.batch);
    outcome.val_f1 = summarize(scenes, val_set->n_classes).overall.f1_30;
    char line[128];
    std::snprintf(line, sizeof(line), "seed %llu threshold %.2f val_f1_30 %.4f\n",
                  static_cast<unsigned long long>(seed), threshold, outcome.val_f1);
    log << line;
  }

  save_checkpoint(model, checkpoint_path);
  outcome.checkpoint_path = checkpoint_path;
  return outcome;
}

}  // namespace sardet::cli
