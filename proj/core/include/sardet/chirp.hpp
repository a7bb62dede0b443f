// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <vector>

namespace sardet {

/// Linear-FM pulse parameters. The sample length L drives both the raw
/// echo footprint and the half-chirp alignment shift.
struct ChirpParams {
  double sample_rate = 0.0;  // Hz
  double chirp_rate = 0.0;   // Hz/s, may be negative
  double duration = 0.0;     // s

  int length_samples() const;

  /// Throws param_error unless sample_rate > 0, duration > 0, L >= 1 and
  /// |chirp_rate| * duration <= sample_rate (LFM sweep stays unaliased).
  void validate() const;

  /// Canonical pulse of a given sample length: unit sample rate scale,
  /// sweep occupying 80% of the band.
  static ChirpParams from_length(int length);
};

/// s[n] = exp(j*pi*K*t_n^2), t_n = (n - L/2) / sample_rate.
/// Every sample has unit magnitude.
std::vector<std::complex<float>> generate_chirp(const ChirpParams& params);

}  // namespace sardet
