#pragma once

#include <complex>
#include <vector>

namespace ringlat {

// In-place radix-2 Cooley-Tukey; size must be a power of two.
void fft_inplace(std::vector<std::complex<double>>& v);

bool is_power_of_two(std::size_t n);

}  // namespace ringlat
