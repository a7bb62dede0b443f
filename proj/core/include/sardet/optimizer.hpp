// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "sardet/tensor.hpp"

namespace sardet {

/// SGD with classical momentum and decoupled-from-nothing L2 weight
/// decay folded into the gradient. Deterministic given a fixed call
/// sequence.
class SgdMomentum {
public:
  SgdMomentum(std::vector<Param*> params, double momentum = 0.9, double weight_decay = 1e-4);

  /// One update step. lr <= 0 is a parameter error.
  void step(double lr);

  void set_params(std::vector<Param*> params);

private:
  std::vector<Param*> params_;
  std::vector<std::vector<float>> velocity_;
  double momentum_;
  double weight_decay_;
};

/// Cosine decay from lr0 to 0 over total_epochs.
double cosine_lr(double lr0, int epoch, int total_epochs);

}  // namespace sardet
