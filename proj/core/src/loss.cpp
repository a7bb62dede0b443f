// SPDX-License-Identifier: Apache-2.0
#include "sardet/loss.hpp"

namespace sardet {

void LossWeights::validate() const {
  if (!(lambda_coord > 0.0) || !(lambda_noobj > 0.0) || !(lambda_class > 0.0))
    throw param_error("loss weights must all be > 0");
}

LossResult detection_loss(const Tensor4& logits, const std::vector<GridTarget>& targets,
                          const LossWeights& weights) {
  weights.validate();
  if (static_cast<int>(targets.size()) != logits.n)
    throw shape_error("detection_loss: " + std::to_string(targets.size()) + " targets for batch " +
                      logits.shape_str());
  if (logits.h != logits.w) throw shape_error("detection_loss: grid must be square");
  const int grid = logits.h;
  const int n_classes = logits.c - 3;
  if (n_classes < 0) throw shape_error("detection_loss: logits need >= 3 channels");

  LossResult res;
  res.dlogits = Tensor4(logits.n, logits.c, logits.h, logits.w);
  double total = 0.0;

  for (int in = 0; in < logits.n; ++in) {
    const GridTarget& t = targets[in];
    if (t.grid != grid || t.n_classes != n_classes)
      throw shape_error("detection_loss: target grid " + std::to_string(t.grid) + "/" +
                        std::to_string(t.n_classes) + " classes vs logits " +
                        std::to_string(grid) + "/" + std::to_string(n_classes));
    for (int row = 0; row < grid; ++row) {
      for (int col = 0; col < grid; ++col) {
        const int at = t.idx(row, col);
        const double obj_logit = logits.at(in, 2, row, col);
        const double obj = sigmoid(obj_logit);
        const double dsig_obj = obj * (1.0 - obj);
        if (t.objectness[at]) {
          for (int axis = 0; axis < 2; ++axis) {
            const double target_v = axis == 0 ? t.tx[at] : t.ty[at];
            const double l = logits.at(in, axis, row, col);
            const double s = sigmoid(l);
            const double diff = s - target_v;
            total += weights.lambda_coord * diff * diff;
            res.dlogits.at(in, axis, row, col) =
                static_cast<float>(weights.lambda_coord * 2.0 * diff * s * (1.0 - s));
          }
          const double diff_obj = obj - 1.0;
          total += diff_obj * diff_obj;
          res.dlogits.at(in, 2, row, col) = static_cast<float>(2.0 * diff_obj * dsig_obj);
          for (int k = 0; k < n_classes; ++k) {
            const double pk = (t.cls[at] == k) ? 1.0 : 0.0;
            const double l = logits.at(in, 3 + k, row, col);
            const double s = sigmoid(l);
            const double diff = s - pk;
            total += weights.lambda_class * diff * diff;
            res.dlogits.at(in, 3 + k, row, col) =
                static_cast<float>(weights.lambda_class * 2.0 * diff * s * (1.0 - s));
          }
        } else {
          total += weights.lambda_noobj * obj * obj;
          res.dlogits.at(in, 2, row, col) =
              static_cast<float>(weights.lambda_noobj * 2.0 * obj * dsig_obj);
        }
      }
    }
  }
  res.value = total;
  return res;
}

}  // namespace sardet
