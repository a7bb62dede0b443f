// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>

#include "sardet/model.hpp"

namespace sardet {

/// Checkpoint file (little-endian):
///   "SDCP" magic, u32 version = 1,
///   config block: u8 size_tag, u32 blocks[4], u32 channels[4],
///                 u32 n_classes, u32 crop, u32 stem_channels,
///   metadata: u32 epochs, u64 seed, f32 threshold (< 0 when unset),
///   u32 n_tensors, then per tensor:
///   u16 name length, name bytes, u8 rank, u32 dims[rank], f32 data.
/// Tensors cover weights, BN affine parameters and BN running
/// statistics; round trips are bit-exact.
void save_checkpoint(Model& model, const std::string& path);

/// Rebuilds the model described by the file.
Model load_checkpoint(const std::string& path);

/// Loads weights into an existing model; a config or tensor mismatch is
/// a format error naming the offending field.
void load_checkpoint_into(Model& model, const std::string& path);

/// Reads only the config/metadata header.
ModelConfig peek_checkpoint_config(const std::string& path, TrainMeta* meta_out = nullptr);

}  // namespace sardet
