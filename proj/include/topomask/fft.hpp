#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace topomask {

using cplx = std::complex<double>;

std::size_t next_pow2(std::size_t n);

// In-place radix-2 FFT on a power-of-two-sized buffer. Convention: forward
// transform is unnormalized, inverse divides by the size. Twiddle tables are
// cached per size and shared across calls (read-only after first build).
void fft(std::vector<cplx>& a, bool inverse);

// Linear convolution of two real sequences via zero-padded FFT.
// Result length is a.size() + b.size() - 1.
std::vector<double> convolve(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace topomask
