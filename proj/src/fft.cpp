#include "stengrid/fft.hpp"

#include <numbers>
#include <stdexcept>
#include <vector>

namespace stengrid {

void fft_inplace(std::complex<double>* data, int n, bool inverse) {
  if (!is_power_of_two(n)) throw std::invalid_argument("fft: length must be a power of two");
  // bit-reversal permutation
  for (int i = 1, j = 0; i < n; ++i) {
    int bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(data[i], data[j]);
  }
  const double sign = inverse ? 1.0 : -1.0;
  for (int len = 2; len <= n; len <<= 1) {
    const double ang = sign * 2.0 * std::numbers::pi / len;
    for (int i = 0; i < n; i += len) {
      for (int j = 0; j < len / 2; ++j) {
        const std::complex<double> w = std::polar(1.0, ang * j);
        const std::complex<double> u = data[i + j];
        const std::complex<double> v = data[i + j + len / 2] * w;
        data[i + j] = u + v;
        data[i + j + len / 2] = u - v;
      }
    }
  }
  if (inverse) {
    const double inv = 1.0 / n;
    for (int i = 0; i < n; ++i) data[i] *= inv;
  }
}

namespace {

void fft_2d_inplace(Spectrum& s, bool inverse) {
  const int ny = static_cast<int>(s.rows());
  const int nx = static_cast<int>(s.cols());
  if (!is_power_of_two(nx) || !is_power_of_two(ny))
    throw std::invalid_argument("fft_2d: grid dimensions must be powers of two");
  for (int j = 0; j < ny; ++j) fft_inplace(s.data() + static_cast<std::ptrdiff_t>(j) * nx, nx, inverse);
  std::vector<std::complex<double>> col(static_cast<std::size_t>(ny));
  for (int i = 0; i < nx; ++i) {
    for (int j = 0; j < ny; ++j) col[static_cast<std::size_t>(j)] = s(j, i);
    fft_inplace(col.data(), ny, inverse);
    for (int j = 0; j < ny; ++j) s(j, i) = col[static_cast<std::size_t>(j)];
  }
}

}  // namespace

Spectrum fft_2d(const Grid2D& g) {
  Spectrum s(g.ny, g.nx);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) s(j, i) = std::complex<double>(g(i, j), 0.0);
  fft_2d_inplace(s, false);
  return s;
}

Spectrum ifft_2d(const Spectrum& in) {
  Spectrum s = in;
  fft_2d_inplace(s, true);
  return s;
}

}  // namespace stengrid
