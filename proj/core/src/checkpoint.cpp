// SPDX-License-Identifier: Apache-2.0
#include "sardet/checkpoint.hpp"

#include "sardet/binio.hpp"

namespace sardet {

namespace {
constexpr char kMagic[4] = {'S', 'D', 'C', 'P'};
constexpr std::uint32_t kVersion = 1;

void write_config(BinaryWriter& w, const ModelConfig& cfg, const TrainMeta& meta) {
  w.put<std::uint8_t>(static_cast<std::uint8_t>(cfg.size_tag));
  for (int b : cfg.blocks) w.put<std::uint32_t>(static_cast<std::uint32_t>(b));
  for (int c : cfg.channels) w.put<std::uint32_t>(static_cast<std::uint32_t>(c));
  w.put<std::uint32_t>(static_cast<std::uint32_t>(cfg.n_classes));
  w.put<std::uint32_t>(static_cast<std::uint32_t>(cfg.crop));
  w.put<std::uint32_t>(static_cast<std::uint32_t>(cfg.stem_channels));
  w.put<std::uint32_t>(meta.epochs);
  w.put<std::uint64_t>(meta.seed);
  w.put<float>(meta.threshold);
}

ModelConfig read_config(BinaryReader& r, TrainMeta* meta_out) {
  ModelConfig cfg;
  cfg.size_tag = static_cast<char>(r.get<std::uint8_t>());
  for (int& b : cfg.blocks) b = static_cast<int>(r.get<std::uint32_t>());
  for (int& c : cfg.channels) c = static_cast<int>(r.get<std::uint32_t>());
  cfg.n_classes = static_cast<int>(r.get<std::uint32_t>());
  cfg.crop = static_cast<int>(r.get<std::uint32_t>());
  cfg.stem_channels = static_cast<int>(r.get<std::uint32_t>());
  TrainMeta meta;
  meta.epochs = r.get<std::uint32_t>();
  meta.seed = r.get<std::uint64_t>();
  meta.threshold = r.get<float>();
  if (meta_out) *meta_out = meta;
  return cfg;
}

std::vector<Param*> all_tensors(Model& model) {
  auto tensors = model.parameters();
  for (auto* b : model.buffers()) tensors.push_back(b);
  return tensors;
}

}  // namespace

void save_checkpoint(Model& model, const std::string& path) {
  BinaryWriter w;
  w.put_bytes(kMagic, 4);
  w.put<std::uint32_t>(kVersion);
  write_config(w, model.config(), model.meta);
  auto tensors = all_tensors(model);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(tensors.size()));
  for (auto* t : tensors) {
    w.put_string(t->name);
    w.put<std::uint8_t>(static_cast<std::uint8_t>(t->shape.size()));
    for (int d : t->shape) w.put<std::uint32_t>(static_cast<std::uint32_t>(d));
    w.put_bytes(t->data.data(), t->data.size() * sizeof(float));
  }
  w.write_file(path);
}

namespace {

void load_tensors(BinaryReader& r, Model& model) {
  auto tensors = all_tensors(model);
  auto n = r.get<std::uint32_t>();
  if (n != tensors.size())
    r.fail("tensor count " + std::to_string(n) + " does not match model (" +
           std::to_string(tensors.size()) + ")");
  for (auto* t : tensors) {
    std::string name = r.get_string();
    if (name != t->name) r.fail("tensor name '" + name + "' where '" + t->name + "' expected");
    auto rank = r.get<std::uint8_t>();
    if (rank != t->shape.size()) r.fail("tensor " + name + ": rank mismatch");
    std::int64_t total = 1;
    for (int i = 0; i < rank; ++i) {
      auto d = r.get<std::uint32_t>();
      if (static_cast<int>(d) != t->shape[i])
        r.fail("tensor " + name + ": dim " + std::to_string(i) + " is " + std::to_string(d) +
               ", model has " + std::to_string(t->shape[i]));
      total *= d;
    }
    r.get_bytes(t->data.data(), static_cast<size_t>(total) * sizeof(float));
  }
  if (r.remaining() != 0) r.fail("trailing bytes after last tensor");
}

}  // namespace

Model load_checkpoint(const std::string& path) {
  BinaryReader r = BinaryReader::from_file(path);
  r.expect_magic(kMagic);
  auto version = r.get<std::uint32_t>();
  if (version != kVersion) r.fail("unsupported checkpoint version " + std::to_string(version));
  TrainMeta meta;
  ModelConfig cfg = read_config(r, &meta);
  cfg.validate();
  Model model(cfg);
  model.meta = meta;
  load_tensors(r, model);
  return model;
}

void load_checkpoint_into(Model& model, const std::string& path) {
  BinaryReader r = BinaryReader::from_file(path);
  r.expect_magic(kMagic);
  auto version = r.get<std::uint32_t>();
  if (version != kVersion) r.fail("unsupported checkpoint version " + std::to_string(version));
  TrainMeta meta;
  ModelConfig cfg = read_config(r, &meta);
  if (!(cfg == model.config())) {
    std::string got(1, cfg.size_tag), want(1, model.config().size_tag);
    r.fail("config mismatch: checkpoint is size " + got + " crop " + std::to_string(cfg.crop) +
           " n_classes " + std::to_string(cfg.n_classes) + ", model is size " + want + " crop " +
           std::to_string(model.config().crop) + " n_classes " +
           std::to_string(model.config().n_classes));
  }
  model.meta = meta;
  load_tensors(r, model);
}

ModelConfig peek_checkpoint_config(const std::string& path, TrainMeta* meta_out) {
  BinaryReader r = BinaryReader::from_file(path);
  r.expect_magic(kMagic);
  auto version = r.get<std::uint32_t>();
  if (version != kVersion) r.fail("unsupported checkpoint version " + std::to_string(version));
  return read_config(r, meta_out);
}

}  // namespace sardet
