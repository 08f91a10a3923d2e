#pragma once

#include <complex>
#include <vector>

namespace hop {

/// In-place 1-D radix-2 FFT. n must be a power of two.
void fft_1d(std::complex<double>* data, int n, bool inverse);

/// In-place 2-D FFT over a row-major w x h grid. w, h powers of two.
/// The inverse transform includes the 1/(w*h) scaling.
void fft_2d(std::vector<std::complex<double>>& data, int w, int h, bool inverse);

int next_pow2(int n);

}  // namespace hop
