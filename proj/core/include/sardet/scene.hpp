// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sardet/chirp.hpp"
#include "sardet/config.hpp"
#include "sardet/image.hpp"

namespace sardet {

enum class TargetClass : std::uint8_t { ship = 0, windmill = 1 };

const char* class_name(TargetClass c);
TargetClass class_from_name(const std::string& name);

/// Ground-truth point target. range_px / azimuth_px give the target's
/// position in label (SLC) space; the raw echo starts at that range bin
/// and is aligned back onto it by the preprocessing ops.
struct TargetSpec {
  int range_px = 0;
  int azimuth_px = 0;
  double amplitude = 1.0;
  TargetClass cls = TargetClass::ship;
};

struct SceneSpec {
  int height = 0;           // azimuth lines
  int width = 0;            // range samples
  std::vector<TargetSpec> targets;
  double noise_sigma = 0.0;    // per-sample complex Gaussian std
  double clutter_sigma = 0.0;  // spatially correlated speckle std
  int azimuth_extent = 1;      // lines an echo spreads over (ships)
  std::uint64_t rng_seed = 0;
  bool near_shore = false;     // adds a high-clutter band on the left

  void validate() const;

  static SceneSpec from_config(const KeyValueConfig& cfg);
  KeyValueConfig to_config() const;
};

/// Label-space position of one target, with simulator-only metadata
/// (amplitude survives in memory but not in the dataset files).
struct SceneLabel {
  float x = 0.0f;  // range column
  float y = 0.0f;  // azimuth row
  TargetClass cls = TargetClass::ship;
  float amplitude = -1.0f;  // < 0 means unknown
};

struct Simulation {
  ComplexImage raw;                 // Domain::raw
  std::vector<SceneLabel> labels;   // one per target, label space
  int truncated_echoes = 0;         // echoes clipped at scene borders
};

/// Fraction of the range axis covered by the near-shore clutter band.
inline constexpr double kNearShoreFraction = 0.25;

/// Synthesizes the raw echo image of a point-target scene.
///
/// A ship contributes one chirp replica per azimuth line it spans,
/// starting at its range bin, with a triangular amplitude taper across
/// azimuth_extent lines. A windmill contributes three equal replicas
/// spaced 4 range bins apart (centered on the label) over twice the
/// azimuth extent. Echoes reaching past the scene border are truncated
/// and counted, never wrapped.
Simulation simulate_raw(const SceneSpec& scene, const ChirpParams& chirp);

}  // namespace sardet
