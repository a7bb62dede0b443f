// SPDX-License-Identifier: Apache-2.0
#include "sardet/scene.hpp"

#include <cmath>
#include <sstream>

#include "sardet/errors.hpp"
#include "sardet/rng.hpp"

namespace sardet {

const char* domain_name(Domain d) {
  switch (d) {
    case Domain::raw: return "raw";
    case Domain::raw_shifted: return "raw_shifted";
    case Domain::range_compressed: return "range_compressed";
    case Domain::focused_label_space: return "focused_label_space";
  }
  return "unknown";
}

double ComplexImage::total_energy() const {
  double e = 0.0;
  for (const auto& z : data) e += static_cast<double>(std::norm(z));
  return e;
}

const char* class_name(TargetClass c) {
  return c == TargetClass::ship ? "ship" : "windmill";
}

TargetClass class_from_name(const std::string& name) {
  if (name == "ship" || name == "0") return TargetClass::ship;
  if (name == "windmill" || name == "1") return TargetClass::windmill;
  throw param_error("unknown target class: " + name);
}

void SceneSpec::validate() const {
  if (height < 1 || width < 1) throw param_error("scene: dimensions must be >= 1");
  if (noise_sigma < 0.0 || clutter_sigma < 0.0)
    throw param_error("scene: noise and clutter sigmas must be >= 0");
  if (azimuth_extent < 1) throw param_error("scene: azimuth_extent must be >= 1");
  for (const auto& t : targets) {
    if (t.range_px < 0 || t.range_px >= width || t.azimuth_px < 0 || t.azimuth_px >= height)
      throw param_error("scene: target outside image bounds");
    if (!(t.amplitude > 0.0)) throw param_error("scene: target amplitude must be > 0");
  }
}

SceneSpec SceneSpec::from_config(const KeyValueConfig& cfg) {
  SceneSpec s;
  s.height = static_cast<int>(cfg.require_int("height"));
  s.width = static_cast<int>(cfg.require_int("width"));
  s.noise_sigma = cfg.get_double("noise_sigma", 0.0);
  s.clutter_sigma = cfg.get_double("clutter_sigma", 0.0);
  s.azimuth_extent = static_cast<int>(cfg.get_int("azimuth_extent", 1));
  s.rng_seed = static_cast<std::uint64_t>(cfg.get_int("seed", 0));
  s.near_shore = cfg.get_bool("near_shore", false);
  if (cfg.has("targets")) {
    for (const auto& item : split(cfg.get("targets"), ';')) {
      if (item.empty()) continue;
      auto f = split(item, ',');
      if (f.size() != 4) throw param_error("scene: target entry needs r,a,amp,class: " + item);
      TargetSpec t;
      t.range_px = std::stoi(f[0]);
      t.azimuth_px = std::stoi(f[1]);
      t.amplitude = std::stod(f[2]);
      t.cls = class_from_name(f[3]);
      s.targets.push_back(t);
    }
  }
  s.validate();
  return s;
}

KeyValueConfig SceneSpec::to_config() const {
  KeyValueConfig cfg;
  cfg.set("height", std::to_string(height));
  cfg.set("width", std::to_string(width));
  cfg.set("noise_sigma", std::to_string(noise_sigma));
  cfg.set("clutter_sigma", std::to_string(clutter_sigma));
  cfg.set("azimuth_extent", std::to_string(azimuth_extent));
  cfg.set("seed", std::to_string(rng_seed));
  if (near_shore) cfg.set("near_shore", "true");
  std::ostringstream ts;
  for (size_t i = 0; i < targets.size(); ++i) {
    if (i) ts << ";";
    ts << targets[i].range_px << "," << targets[i].azimuth_px << ","
       << targets[i].amplitude << "," << class_name(targets[i].cls);
  }
  if (!targets.empty()) cfg.set("targets", ts.str());
  return cfg;
}

namespace {

// Adds one chirp replica at (row, start_col), scaled by amp. Returns
// true if any sample fell outside the range extent.
bool add_replica(ComplexImage& img, int row, int start_col, double amp,
                 const std::vector<std::complex<float>>& chirp) {
  bool truncated = false;
  for (int j = 0; j < static_cast<int>(chirp.size()); ++j) {
    int col = start_col + j;
    if (col < 0 || col >= img.width) {
      truncated = true;
      continue;
    }
    img.at(row, col) += static_cast<float>(amp) * chirp[j];
  }
  return truncated;
}

// Spatially correlated complex speckle: white Gaussian field smoothed
// with a circular [1,2,1]/4 kernel along both axes, rescaled to unit
// per-sample std (the two passes shrink the std by exactly 6/16).
void add_clutter(ComplexImage& img, double sigma, double shore_boost, Rng& rng) {
  const int h = img.height, w = img.width;
  std::vector<std::complex<double>> field(static_cast<size_t>(h) * w);
  const double comp = 1.0 / std::sqrt(2.0);
  for (auto& z : field) z = {rng.gaussian() * comp, rng.gaussian() * comp};

  std::vector<std::complex<double>> tmp(field.size());
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      int cl = (c + w - 1) % w, cr = (c + 1) % w;
      tmp[r * static_cast<size_t>(w) + c] =
          0.25 * (field[r * static_cast<size_t>(w) + cl] + 2.0 * field[r * static_cast<size_t>(w) + c] +
                  field[r * static_cast<size_t>(w) + cr]);
    }
  }
  const double rescale = 16.0 / 6.0;
  const int shore_cols = static_cast<int>(w * kNearShoreFraction);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      int ru = (r + h - 1) % h, rd = (r + 1) % h;
      std::complex<double> v =
          0.25 * (tmp[ru * static_cast<size_t>(w) + c] + 2.0 * tmp[r * static_cast<size_t>(w) + c] +
                  tmp[rd * static_cast<size_t>(w) + c]);
      double s = sigma * rescale;
      if (shore_boost > 1.0 && c < shore_cols) s *= shore_boost;
      img.at(r, c) += std::complex<float>(static_cast<float>(v.real() * s),
                                          static_cast<float>(v.imag() * s));
    }
  }
}

}  // namespace

Simulation simulate_raw(const SceneSpec& scene, const ChirpParams& chirp) {
  scene.validate();
  const auto pulse = generate_chirp(chirp);

  Simulation sim;
  sim.raw = ComplexImage(scene.height, scene.width, Domain::raw);

  for (const auto& t : scene.targets) {
    const bool windmill = t.cls == TargetClass::windmill;
    const int extent = windmill ? 2 * scene.azimuth_extent : scene.azimuth_extent;
    const double half = (extent + 1) / 2.0;
    const int row0 = t.azimuth_px - (extent - 1) / 2;
    bool truncated = false;
    for (int k = 0; k < extent; ++k) {
      int row = row0 + k;
      if (row < 0 || row >= scene.height) {
        truncated = true;
        continue;
      }
      double taper = 1.0 - std::abs(row - t.azimuth_px) / half;
      if (windmill) {
        for (int off : {-4, 0, 4})
          truncated |= add_replica(sim.raw, row, t.range_px + off, t.amplitude * taper, pulse);
      } else {
        truncated |= add_replica(sim.raw, row, t.range_px, t.amplitude * taper, pulse);
      }
    }
    if (truncated) ++sim.truncated_echoes;
    sim.labels.push_back({static_cast<float>(t.range_px), static_cast<float>(t.azimuth_px),
                          t.cls, static_cast<float>(t.amplitude)});
  }

  Rng rng(scene.rng_seed);
  if (scene.clutter_sigma > 0.0) {
    add_clutter(sim.raw, scene.clutter_sigma, scene.near_shore ? 8.0 : 1.0, rng);
  }
  if (scene.noise_sigma > 0.0) {
    const double comp = scene.noise_sigma / std::sqrt(2.0);
    for (auto& z : sim.raw.data)
      z += std::complex<float>(static_cast<float>(rng.gaussian() * comp),
                               static_cast<float>(rng.gaussian() * comp));
  }
  return sim;
}

}  // namespace sardet
