// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "sardet/errors.hpp"

namespace sardet {

/// Processing stage of a complex SAR raster. Transitions are one-way:
/// raw -> raw_shifted (stripmap path) or raw -> range_compressed (IW path).
enum class Domain : std::uint8_t {
  raw = 0,
  raw_shifted = 1,
  range_compressed = 2,
  focused_label_space = 3,
};

const char* domain_name(Domain d);

/// 2D complex raster. Rows are azimuth lines, columns are range samples.
/// Data is row-major; std::complex<float> gives the interleaved
/// (real, imag) f32 layout the on-disk format uses.
struct ComplexImage {
  int height = 0;
  int width = 0;
  Domain domain = Domain::raw;
  std::vector<std::complex<float>> data;

  ComplexImage() = default;
  ComplexImage(int h, int w, Domain d = Domain::raw)
      : height(h), width(w), domain(d), data(static_cast<size_t>(h) * w) {
    if (h < 1 || w < 1) throw param_error("ComplexImage: dimensions must be >= 1");
  }

  std::complex<float>& at(int row, int col) {
    return data[static_cast<size_t>(row) * width + col];
  }
  const std::complex<float>& at(int row, int col) const {
    return data[static_cast<size_t>(row) * width + col];
  }

  /// Sum of |z|^2 over all samples.
  double total_energy() const;
};

}  // namespace sardet
