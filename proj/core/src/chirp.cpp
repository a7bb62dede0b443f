// SPDX-License-Identifier: Apache-2.0
#include "sardet/chirp.hpp"

#include <cmath>

#include "sardet/errors.hpp"

namespace sardet {

int ChirpParams::length_samples() const {
  return static_cast<int>(std::lround(duration * sample_rate));
}

void ChirpParams::validate() const {
  if (!(sample_rate > 0.0)) throw param_error("chirp: sample_rate must be > 0");
  if (!(duration > 0.0)) throw param_error("chirp: duration must be > 0");
  if (length_samples() < 1) throw param_error("chirp: duration * sample_rate rounds to zero samples");
  if (std::abs(chirp_rate) * duration > sample_rate * (1.0 + 1e-12))
    throw param_error("chirp: |K| * T exceeds the sample rate, sweep would alias");
}

ChirpParams ChirpParams::from_length(int length) {
  if (length < 1) throw param_error("chirp: length must be >= 1");
  ChirpParams p;
  p.sample_rate = 1000.0;
  p.duration = length / p.sample_rate;
  p.chirp_rate = 0.8 * p.sample_rate / p.duration;
  return p;
}

std::vector<std::complex<float>> generate_chirp(const ChirpParams& params) {
  params.validate();
  const int n = params.length_samples();
  std::vector<std::complex<float>> s(n);
  const double pi = 3.14159265358979323846;
  for (int i = 0; i < n; ++i) {
    double t = (i - n / 2.0) / params.sample_rate;
    double phase = pi * params.chirp_rate * t * t;
    s[i] = std::complex<float>(static_cast<float>(std::cos(phase)),
                               static_cast<float>(std::sin(phase)));
  }
  return s;
}

}  // namespace sardet
