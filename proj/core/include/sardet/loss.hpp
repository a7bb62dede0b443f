// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "sardet/grid.hpp"
#include "sardet/tensor.hpp"

namespace sardet {

/// Grid-loss weights: coordinate, no-object and class terms. The
/// classic single-stage values; there is no box-size term anywhere.
struct LossWeights {
  double lambda_coord = 5.0;
  double lambda_noobj = 0.5;
  double lambda_class = 1.0;

  void validate() const;
};

struct LossResult {
  double value = 0.0;  // summed over the batch
  Tensor4 dlogits;     // same shape as logits
};

/// Squared-error grid loss on sigmoid-squashed logits, one target per
/// batch row:
///   lambda_coord * sum_obj [(s(tx)-tx*)^2 + (s(ty)-ty*)^2]
///   + sum_obj (s(obj)-1)^2 + lambda_noobj * sum_noobj s(obj)^2
///   + lambda_class * sum_obj sum_k (s(p_k) - p_k*)^2
LossResult detection_loss(const Tensor4& logits, const std::vector<GridTarget>& targets,
                          const LossWeights& weights);

}  // namespace sardet
