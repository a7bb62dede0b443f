// SPDX-License-Identifier: Apache-2.0
#include "sardet/optimizer.hpp"

#include <cmath>

#include "sardet/errors.hpp"

namespace sardet {

SgdMomentum::SgdMomentum(std::vector<Param*> params, double momentum, double weight_decay)
    : momentum_(momentum), weight_decay_(weight_decay) {
  set_params(std::move(params));
}

void SgdMomentum::set_params(std::vector<Param*> params) {
  params_ = std::move(params);
  velocity_.clear();
  for (auto* p : params_) velocity_.emplace_back(p->data.size(), 0.0f);
}

void SgdMomentum::step(double lr) {
  if (!(lr > 0.0)) throw param_error("sgd: learning rate must be > 0");
  const float mu = static_cast<float>(momentum_);
  const float wd = static_cast<float>(weight_decay_);
  const float eta = static_cast<float>(lr);
  for (size_t i = 0; i < params_.size(); ++i) {
    Param& p = *params_[i];
    auto& v = velocity_[i];
    for (size_t j = 0; j < v.size(); ++j) {
      float g = p.grad[j] + wd * p.data[j];
      v[j] = mu * v[j] + g;
      p.data[j] -= eta * v[j];
    }
  }
}

double cosine_lr(double lr0, int epoch, int total_epochs) {
  if (total_epochs <= 1) return lr0;
  double t = static_cast<double>(epoch) / static_cast<double>(total_epochs);
  return lr0 * 0.5 * (1.0 + std::cos(3.14159265358979323846 * t));
}

}  // namespace sardet
