#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace vowelrec {

// Smallest power of two >= n (n >= 1).
std::size_t next_pow2(std::size_t n);

// In-place iterative radix-2 FFT, unnormalized forward transform
// X[k] = sum_n x[n] e^{-2*pi*i*k*n/N}. Size must be a power of two.
void fft_radix2(std::vector<std::complex<double>>& buf);

}  // namespace vowelrec
