// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace sardet {

/// In-place iterative radix-2 FFT. Size must be a power of two.
/// Double precision throughout; the inverse includes the 1/N scale.
void fft(std::vector<std::complex<double>>& a, bool inverse);

std::size_t next_pow2(std::size_t n);

}  // namespace sardet
