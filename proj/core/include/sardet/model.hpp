// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sardet/layers.hpp"

namespace sardet {

/// Backbone geometry. Presets S/M/L follow the published block/channel
/// schedule; tag 'C' marks custom configurations (used by small test
/// networks). Total spatial downsampling is always 32: stem conv s2,
/// pool s2, layer strides 1,2,2,2.
struct ModelConfig {
  char size_tag = 'S';
  std::array<int, 4> blocks{1, 2, 2, 1};
  std::array<int, 4> channels{16, 16, 32, 32};
  int n_classes = 0;  // 0 (detection only) or 2 (ship/windmill)
  int crop = 128;     // multiple of 32
  int stem_channels = 64;

  static ModelConfig preset(char tag, int crop, int n_classes);
  void validate() const;

  int grid() const { return crop / 32; }
  int head_channels() const { return 3 + n_classes; }
  bool operator==(const ModelConfig&) const = default;
};

struct TrainMeta {
  std::uint32_t epochs = 0;
  std::uint64_t seed = 0;
  float threshold = -1.0f;  // < 0 means not selected yet

  bool has_threshold() const { return threshold >= 0.0f; }
};

/// Residual unit: 3x3 conv, BN, ReLU, 3x3 conv, BN, add, ReLU. A 1x1
/// projection (conv + BN) joins the shortcut when stride or channel
/// count changes. The second BN starts at gamma = 0, so a fresh block is
/// an identity + ReLU.
struct BasicBlock {
  BasicBlock(const std::string& name, int in_c, int out_c, int stride);

  Tensor4 forward(const Tensor4& x, Mode mode);
  Tensor4 backward(const Tensor4& dy);
  void collect(std::vector<Param*>& params, std::vector<Param*>& buffers);

  Conv2d conv1, conv2;
  BatchNorm2d bn1, bn2;
  ReLU relu1, relu2;
  std::optional<Conv2d> proj;
  std::optional<BatchNorm2d> proj_bn;
};

/// The detector network: 7x7/s2 stem into 3x3/s2 max-pool, four residual
/// layers, and a 1x1 head emitting per-cell (tx, ty, objectness[, class])
/// logits on a (crop/32)^2 grid. Input is the 2-channel complex raster.
class Model {
public:
  explicit Model(const ModelConfig& config, std::uint64_t init_seed = 0);

  /// Batch forward. Eval mode mutates nothing and is safe to call
  /// concurrently on a shared instance.
  Tensor4 forward(const Tensor4& batch, Mode mode);

  /// Propagates loss gradients recorded against the last train-mode
  /// forward; accumulates into parameter grads.
  void backward(const Tensor4& dlogits);

  std::vector<Param*> parameters();
  std::vector<Param*> buffers();
  void zero_grad();

  /// Trainable parameter count (conv weights/biases, BN affine).
  std::int64_t param_count();

  bool bn_stats_ready() const;

  const ModelConfig& config() const { return config_; }
  TrainMeta meta;

  static constexpr int kInputChannels = 2;
  static constexpr int kCellPx = 32;

  // Layer access for quantization (BN folding walks the graph).
  Conv2d stem_conv;
  BatchNorm2d stem_bn;
  ReLU stem_relu;
  MaxPool3x3s2 stem_pool;
  std::vector<std::vector<BasicBlock>> layers;
  Conv2d head;

private:
  ModelConfig config_;
};

/// He-uniform initialization of every conv weight, seeded and ordered
/// deterministically; head bias zero.
void init_parameters(Model& model, std::uint64_t seed);

}  // namespace sardet
