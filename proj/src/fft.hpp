#pragma once

#include <complex>
#include <vector>

namespace gsim::detail {

// In-place complex DFT (FFTW behind a plan cache; thread-safe).
// sign = -1 forward, +1 backward. Backward is unnormalized.
void fft_inplace(std::vector<std::complex<double>>& data, int sign);

}  // namespace gsim::detail
