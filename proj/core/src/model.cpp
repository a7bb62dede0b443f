// SPDX-License-Identifier: Apache-2.0
#include "sardet/model.hpp"

#include <cmath>

#include "sardet/rng.hpp"

namespace sardet {

ModelConfig ModelConfig::preset(char tag, int crop, int n_classes) {
  ModelConfig cfg;
  cfg.size_tag = tag;
  cfg.crop = crop;
  cfg.n_classes = n_classes;
  switch (tag) {
    case 'S':
      cfg.blocks = {1, 2, 2, 1};
      cfg.channels = {16, 16, 32, 32};
      break;
    case 'M':
      cfg.blocks = {3, 4, 6, 3};
      cfg.channels = {64, 64, 64, 64};
      break;
    case 'L':
      cfg.blocks = {2, 2, 2, 2};
      cfg.channels = {64, 128, 256, 512};
      break;
    default:
      throw param_error(std::string("unknown model size tag '") + tag + "', expected S, M or L");
  }
  cfg.validate();
  return cfg;
}

void ModelConfig::validate() const {
  if (crop < 32 || crop % 32 != 0)
    throw param_error("model: crop must be a positive multiple of 32, got " + std::to_string(crop));
  if (n_classes != 0 && n_classes != 2)
    throw param_error("model: n_classes must be 0 or 2, got " + std::to_string(n_classes));
  if (stem_channels < 1) throw param_error("model: stem_channels must be >= 1");
  for (int b : blocks)
    if (b < 1) throw param_error("model: blocks per layer must be >= 1");
  for (int c : channels)
    if (c < 1) throw param_error("model: channels must be >= 1");
}

BasicBlock::BasicBlock(const std::string& name, int in_c, int out_c, int stride)
    : conv1(name + ".conv1", in_c, out_c, 3, stride, false),
      conv2(name + ".conv2", out_c, out_c, 3, 1, false),
      bn1(name + ".bn1", out_c),
      bn2(name + ".bn2", out_c) {
  if (stride != 1 || in_c != out_c) {
    proj.emplace(name + ".proj", in_c, out_c, 1, stride, false);
    proj_bn.emplace(name + ".proj_bn", out_c);
  }
  // Zero-gamma on the closing BN: the residual branch starts silent.
  std::fill(bn2.gamma.data.begin(), bn2.gamma.data.end(), 0.0f);
}

Tensor4 BasicBlock::forward(const Tensor4& x, Mode mode) {
  Tensor4 main = relu1.forward(bn1.forward(conv1.forward(x, mode), mode), mode);
  main = bn2.forward(conv2.forward(main, mode), mode);
  Tensor4 shortcut = proj ? proj_bn->forward(proj->forward(x, mode), mode) : x;
  if (!main.same_shape(shortcut))
    throw shape_error("block: branch shapes differ, " + main.shape_str() + " vs " +
                      shortcut.shape_str());
  for (std::int64_t i = 0; i < main.size(); ++i) main.data[i] += shortcut.data[i];
  return relu2.forward(main, mode);
}

Tensor4 BasicBlock::backward(const Tensor4& dy) {
  Tensor4 dsum = relu2.backward(dy);
  Tensor4 dmain = conv1.backward(bn1.backward(relu1.backward(conv2.backward(bn2.backward(dsum)))));
  Tensor4 dshort = proj ? proj->backward(proj_bn->backward(dsum)) : std::move(dsum);
  for (std::int64_t i = 0; i < dmain.size(); ++i) dmain.data[i] += dshort.data[i];
  return dmain;
}

void BasicBlock::collect(std::vector<Param*>& params, std::vector<Param*>& buffers) {
  for (auto* p : conv1.params()) params.push_back(p);
  for (auto* p : bn1.params()) params.push_back(p);
  for (auto* p : conv2.params()) params.push_back(p);
  for (auto* p : bn2.params()) params.push_back(p);
  if (proj) {
    for (auto* p : proj->params()) params.push_back(p);
    for (auto* p : proj_bn->params()) params.push_back(p);
  }
  for (auto* b : bn1.buffers()) buffers.push_back(b);
  for (auto* b : bn2.buffers()) buffers.push_back(b);
  if (proj_bn)
    for (auto* b : proj_bn->buffers()) buffers.push_back(b);
}

Model::Model(const ModelConfig& config, std::uint64_t init_seed)
    : stem_conv("stem.conv", kInputChannels, config.stem_channels, 7, 2, false),
      stem_bn("stem.bn", config.stem_channels),
      head("head.conv", config.channels[3], config.head_channels(), 1, 1, true),
      config_(config) {
  config_.validate();
  static const int kLayerStride[4] = {1, 2, 2, 2};
  int in_c = config.stem_channels;
  for (int layer = 0; layer < 4; ++layer) {
    std::vector<BasicBlock> stage;
    for (int b = 0; b < config.blocks[layer]; ++b) {
      int stride = (b == 0) ? kLayerStride[layer] : 1;
      int cin = (b == 0) ? in_c : config.channels[layer];
      stage.emplace_back("layer" + std::to_string(layer + 1) + ".block" + std::to_string(b),
                         cin, config.channels[layer], stride);
    }
    layers.push_back(std::move(stage));
    in_c = config.channels[layer];
  }
  init_parameters(*this, init_seed);
}

Tensor4 Model::forward(const Tensor4& batch, Mode mode) {
  if (batch.c != kInputChannels || batch.h != config_.crop || batch.w != config_.crop)
    throw shape_error("model: input " + batch.shape_str() + " but expected Nx" +
                      std::to_string(kInputChannels) + "x" + std::to_string(config_.crop) + "x" +
                      std::to_string(config_.crop));
  Tensor4 x = stem_pool.forward(
      stem_relu.forward(stem_bn.forward(stem_conv.forward(batch, mode), mode), mode), mode);
  for (auto& stage : layers)
    for (auto& block : stage) x = block.forward(x, mode);
  return head.forward(x, mode);
}

void Model::backward(const Tensor4& dlogits) {
  Tensor4 d = head.backward(dlogits);
  for (auto stage = layers.rbegin(); stage != layers.rend(); ++stage)
    for (auto block = stage->rbegin(); block != stage->rend(); ++block) d = block->backward(d);
  stem_conv.backward(stem_bn.backward(stem_relu.backward(stem_pool.backward(d))));
}

std::vector<Param*> Model::parameters() {
  std::vector<Param*> params;
  std::vector<Param*> buffers;
  for (auto* p : stem_conv.params()) params.push_back(p);
  for (auto* p : stem_bn.params()) params.push_back(p);
  for (auto& stage : layers)
    for (auto& block : stage) block.collect(params, buffers);
  for (auto* p : head.params()) params.push_back(p);
  return params;
}

std::vector<Param*> Model::buffers() {
  std::vector<Param*> params;
  std::vector<Param*> buffers;
  for (auto* b : stem_bn.buffers()) buffers.push_back(b);
  for (auto& stage : layers)
    for (auto& block : stage) block.collect(params, buffers);
  return buffers;
}

void Model::zero_grad() {
  for (auto* p : parameters()) p->zero_grad();
}

std::int64_t Model::param_count() {
  std::int64_t total = 0;
  for (auto* p : parameters()) total += p->size();
  return total;
}

bool Model::bn_stats_ready() const { return stem_bn.stats_ready(); }

void init_parameters(Model& model, std::uint64_t seed) {
  Rng rng(seed ^ 0x5b5ad4u);
  auto he_uniform = [&](Param& w, int fan_in) {
    double bound = std::sqrt(6.0 / fan_in);
    for (auto& v : w.data) v = static_cast<float>(rng.uniform(-bound, bound));
  };
  auto init_conv = [&](Conv2d& conv) {
    he_uniform(conv.weight, conv.in_channels() * conv.kernel() * conv.kernel());
    if (conv.bias) std::fill(conv.bias->data.begin(), conv.bias->data.end(), 0.0f);
  };
  init_conv(model.stem_conv);
  for (auto& stage : model.layers) {
    for (auto& block : stage) {
      init_conv(block.conv1);
      init_conv(block.conv2);
      if (block.proj) init_conv(*block.proj);
    }
  }
  init_conv(model.head);
}

}  // namespace sardet
