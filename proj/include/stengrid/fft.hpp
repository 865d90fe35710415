#pragma once

#include "stengrid/grid.hpp"

#include <complex>

namespace stengrid {

using Spectrum =
    Eigen::Array<std::complex<double>, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

constexpr bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

/// Radix-2 transform; n must be a power of two. Forward is unnormalized,
/// inverse divides by n.
void fft_inplace(std::complex<double>* data, int n, bool inverse);

/// Row-column 2D transform of a real field; both dimensions must be powers
/// of two. Entry (j, i) of the result is mode (kx = i, ky = j) before
/// folding. Forward is unnormalized; ifft_2d divides by nx*ny.
Spectrum fft_2d(const Grid2D& g);
Spectrum ifft_2d(const Spectrum& s);

}  // namespace stengrid
