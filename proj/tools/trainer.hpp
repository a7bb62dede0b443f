// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>
#include <string>

#include "sardet/checkpoint.hpp"
#include "sardet/config.hpp"
#include "sardet/dataset.hpp"
#include "sardet/loss.hpp"

namespace sardet::cli {

struct TrainSpec {
  char size_tag = 'S';
  int crop = 128;
  int epochs = 12;
  int batch = 16;
  double lr = 0.01;
  double momentum = 0.9;
  double weight_decay = 1e-4;
  std::vector<std::uint64_t> seeds{1, 2, 3};
  std::string threshold_policy = "auto";  // "auto" or a fixed value
  LossWeights loss;

  static TrainSpec from_config(const KeyValueConfig& cfg);
};

struct TrainOutcome {
  double final_loss = 0.0;
  double val_f1 = -1.0;
  double threshold = 0.5;
  std::string checkpoint_path;
};

/// Trains one seed end to end and writes the checkpoint (with the
/// selected acceptance threshold in its metadata). `resume_from`, when
/// non-empty, continues epoch numbering from an earlier checkpoint.
TrainOutcome train_one_seed(const TrainSpec& spec, std::uint64_t seed, const Dataset& train_set,
                            const Dataset* val_set, const std::string& checkpoint_path,
                            std::ostream& log, const std::string& resume_from = "");

}  // namespace sardet::cli
