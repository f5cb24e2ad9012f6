#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace vz::fft {

std::size_t next_pow2(std::size_t n);

// Real-to-complex forward transform. x is zero-padded (or truncated) to n_fft;
// returns n_fft/2 + 1 bins.
std::vector<std::complex<double>> rfft(const std::vector<double>& x, std::size_t n_fft);

// Inverse of rfft, normalized by 1/n_fft. Returns n_fft real samples.
std::vector<double> irfft(const std::vector<std::complex<double>>& spec, std::size_t n_fft);

}  // namespace vz::fft
