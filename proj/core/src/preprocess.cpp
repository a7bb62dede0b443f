// SPDX-License-Identifier: Apache-2.0
#include "sardet/preprocess.hpp"

#include "sardet/errors.hpp"
#include "sardet/fft.hpp"
#include "sardet/parallel.hpp"

namespace sardet {

ComplexImage range_compress(const ComplexImage& img, const ChirpParams& chirp) {
  if (img.domain != Domain::raw)
    throw state_error(std::string("range_compress expects raw input, got ") +
                      domain_name(img.domain));
  const auto pulse = generate_chirp(chirp);
  const int w = img.width;
  const int len = static_cast<int>(pulse.size());
  const std::size_t n = next_pow2(static_cast<std::size_t>(w) + len);

  // Reference spectrum, conjugated once: correlation = IFFT(X * conj(S)).
  std::vector<std::complex<double>> ref(n, {0.0, 0.0});
  for (int j = 0; j < len; ++j) ref[j] = std::complex<double>(pulse[j].real(), pulse[j].imag());
  fft(ref, false);
  for (auto& z : ref) z = std::conj(z);

  ComplexImage out(img.height, img.width, Domain::range_compressed);
  parallel_for(img.height, 8, [&](std::int64_t r0, std::int64_t r1) {
    std::vector<std::complex<double>> line(n);
    for (std::int64_t row = r0; row < r1; ++row) {
      std::fill(line.begin(), line.end(), std::complex<double>(0.0, 0.0));
      for (int c = 0; c < w; ++c) {
        const auto& z = img.at(static_cast<int>(row), c);
        line[c] = std::complex<double>(z.real(), z.imag());
      }
      fft(line, false);
      for (std::size_t k = 0; k < n; ++k) line[k] *= ref[k];
      fft(line, true);
      for (int c = 0; c < w; ++c)
        out.at(static_cast<int>(row), c) =
            std::complex<float>(static_cast<float>(line[c].real()),
                                static_cast<float>(line[c].imag()));
    }
  });
  return out;
}

ComplexImage half_chirp_shift(const ComplexImage& img, const ChirpParams& chirp) {
  if (img.domain != Domain::raw)
    throw state_error(std::string("half_chirp_shift expects raw input, got ") +
                      domain_name(img.domain));
  chirp.validate();
  const int shift = chirp.length_samples() / 2;
  if (shift >= img.width)
    throw param_error("half_chirp_shift: floor(L/2) = " + std::to_string(shift) +
                      " >= image width " + std::to_string(img.width));
  ComplexImage out(img.height, img.width, Domain::raw_shifted);
  for (int r = 0; r < img.height; ++r) {
    for (int c = 0; c + shift < img.width; ++c) out.at(r, c) = img.at(r, c + shift);
    // Trailing bins stay zero.
  }
  return out;
}

OffsetCorrection iw_offset_correct(const std::vector<SceneLabel>& crop_labels,
                                   int crop_origin_row, int crop_origin_col,
                                   int crop, const OffsetMap& offset_map) {
  if (!offset_map) throw param_error("iw_offset_correct: null offset map");
  const auto [drow, dcol] = offset_map(crop_origin_row + crop / 2, crop_origin_col + crop / 2);
  OffsetCorrection result;
  for (const auto& label : crop_labels) {
    SceneLabel moved = label;
    moved.x += static_cast<float>(dcol);
    moved.y += static_cast<float>(drow);
    if (moved.x < 0.0f || moved.x >= static_cast<float>(crop) || moved.y < 0.0f ||
        moved.y >= static_cast<float>(crop)) {
      ++result.dropped;
      continue;
    }
    result.labels.push_back(moved);
  }
  return result;
}

}  // namespace sardet
