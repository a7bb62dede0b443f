// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "sardet/model.hpp"

namespace sardet {

/// Affine int8 quantization of one tensor: real = scale * (q - zero_point).
/// Post-ReLU activations use an asymmetric [0, max] range with
/// zero_point -128; signed tensors are symmetric with zero_point 0.
struct QuantParams {
  float scale = 1.0f;
  int zero_point = 0;

  static constexpr float kMinScale = 1e-8f;

  static QuantParams asymmetric_relu(float hi);        // range [0, hi]
  static QuantParams symmetric(float lo, float hi);    // range [-a, a]

  std::int8_t quantize(float v) const;
  float dequantize(std::int8_t q) const { return scale * (static_cast<int>(q) - zero_point); }
};

/// Observed activation range at one quantization point.
struct ActRange {
  std::string name;
  float lo = 0.0f;
  float hi = 0.0f;
};

struct Calibration {
  std::vector<ActRange> ranges;
  std::vector<std::string> warnings;  // degenerate ranges clamped, etc.

  const ActRange& find(const std::string& name) const;
};

/// Eval-time float model with every BN folded into the preceding conv
/// (weights scaled by gamma/sqrt(var+eps), bias absorbing beta and the
/// running mean). Matches the source model's eval forward to float
/// round-off; requires recorded BN statistics.
class FoldedModel {
public:
  explicit FoldedModel(Model& model);

  Tensor4 forward(const Tensor4& batch);

  /// Forward that reports each activation tensor at a quantization
  /// point: input, stem (post-ReLU), and per block mid / proj / out.
  using Collector = std::function<void(const std::string&, const Tensor4&)>;
  Tensor4 forward_collect(const Tensor4& batch, const Collector& collect);

  struct Block {
    Conv2d conv1, conv2;
    std::optional<Conv2d> proj;
    int stride;
    std::string name;
  };

  Conv2d stem;
  MaxPool3x3s2 pool;
  std::vector<Block> blocks;
  Conv2d head;
  ModelConfig config;
  TrainMeta meta;

private:
  ReLU relu_;
};

/// Min/max activation calibration over a batch set (post-training, no
/// optimization pass). At least one batch is required.
Calibration calibrate(FoldedModel& folded, const std::vector<Tensor4>& calibration_batches);

/// Rounds half away from zero to the nearest int (the single rounding in
/// each requantization).
std::int32_t round_half_away(double v);

/// Fixed-point multiplier m * 2^-(31+shift) approximating a positive
/// real factor.
struct FixedMul {
  std::int32_t m = 0;
  int shift = 0;

  static FixedMul from_double(double value);
  std::int32_t apply(std::int64_t acc) const;  // round-half-away-from-zero
};

/// One int8 conv layer: per-output-channel symmetric weights, folded
/// f32 bias, plus the integer pipeline constants derived from the
/// surrounding activation quantization points.
struct QConvLayer {
  std::string name;
  int in_c = 0, out_c = 0, kernel = 1, stride = 1;
  std::vector<std::int8_t> weight;  // [out_c][in_c*k*k]
  std::vector<float> wscale;        // per output channel
  std::vector<float> bias;          // f32, folded

  // Derived, rebuilt after load:
  std::vector<std::int32_t> wsum;      // per-channel weight sums
  std::vector<std::int32_t> bias_int;  // bias in accumulator units
  std::vector<FixedMul> requant;       // accumulator -> output scale

  int out_extent(int in) const { return (in + 2 * (kernel / 2) - kernel) / stride + 1; }
};

struct QBlock {
  QConvLayer conv1, conv2;
  std::optional<QConvLayer> proj;
  QuantParams q_mid, q_out;
  QuantParams q_proj;       // meaningful when proj is present
  FixedMul shortcut_scale;  // identity shortcut, input units -> out units
};

/// Int8 network: integer convolutions with 32-bit accumulators and one
/// fixed-point requantization per layer; the head emits f32 logits.
class QuantizedModel {
public:
  QuantizedModel(FoldedModel& folded, const Calibration& calibration);

  /// Float batch in, float grid logits out; all hidden layers int8.
  /// Pure and safe for concurrent use.
  Tensor4 forward(const Tensor4& batch) const;

  /// Quantized checkpoint, magic "SDQ8": config/meta block as in the
  /// float checkpoint, then per-tensor records (int8 tensors, f32
  /// tensors, activation QuantParams). Round trips are bit-exact.
  void save(const std::string& path) const;
  static QuantizedModel load(const std::string& path);

  ModelConfig config;
  TrainMeta meta;
  QuantParams q_input, q_stem;
  QConvLayer stem;
  std::vector<QBlock> blocks;
  QConvLayer head;
  QuantParams q_head_in;  // output point of the last block

private:
  QuantizedModel() = default;
  void prepare();  // derive wsum / bias_int / requant constants
};

}  // namespace sardet
