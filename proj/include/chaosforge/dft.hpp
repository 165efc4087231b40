#pragma once
#include <cstddef>
#include <vector>

namespace chaosforge {

// Magnitude spectrum of a real input: bins 0..floor(n/2) inclusive.
// Radix-2 FFT when n is a power of two, direct O(n^2) DFT otherwise.
std::vector<double> rdft_magnitude(const double* x, size_t n);
std::vector<double> rdft_magnitude(const std::vector<double>& x);

}  // namespace chaosforge
