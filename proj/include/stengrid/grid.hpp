#pragma once

#include <Eigen/Core>

#include <cassert>
#include <cstdint>
#include <vector>

namespace stengrid {

/// Row-major storage backing every field: entry (j, i) lives at j*nx + i,
/// i.e. rows are y-lines and the x index runs fastest.
using Array2d = Eigen::Array<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

namespace detail {
/// Count of grid-sized buffer allocations made by the library. The benchmark
/// uses this to show the timed region performs no field allocations.
std::int64_t large_alloc_count() noexcept;
void note_large_alloc() noexcept;
}  // namespace detail

/// A uniform 2D field of doubles. `i` indexes x (column, fastest), `j`
/// indexes y (row); the sample at (i, j) sits at values(j, i) and represents
/// the point (i*dx, j*dy).
struct Grid2D {
  int nx = 0;
  int ny = 0;
  double dx = 1.0;
  double dy = 1.0;
  Array2d values;

  Grid2D() = default;
  Grid2D(int nx_, int ny_, double dx_, double dy_);
  Grid2D(const Grid2D& other);
  Grid2D& operator=(const Grid2D& other);
  Grid2D(Grid2D&&) noexcept = default;
  Grid2D& operator=(Grid2D&&) noexcept = default;

  double operator()(int i, int j) const { return values(j, i); }
  double& operator()(int i, int j) { return values(j, i); }

  const double* data() const { return values.data(); }
  double* data() { return values.data(); }
  std::ptrdiff_t size() const { return static_cast<std::ptrdiff_t>(nx) * ny; }

  bool same_shape(const Grid2D& other) const {
    return nx == other.nx && ny == other.ny;
  }
};

/// How far a stencil window reaches from its evaluation point, in points.
/// A pure-x stencil has top = bottom = 0; a pure-y stencil left = right = 0.
struct Extents {
  int left = 0;
  int right = 0;
  int top = 0;
  int bottom = 0;

  int width() const { return left + right + 1; }
  int height() const { return top + bottom + 1; }
  bool valid() const { return left >= 0 && right >= 0 && top >= 0 && bottom >= 0; }
};

enum class BoundaryMode { Periodic, NonPeriodic };

/// One contiguous run of rows [jBegin, jEnd).
struct TileRange {
  int jBegin = 0;
  int jEnd = 0;
};

/// Partition of the row range [0, ny) into contiguous, ordered, disjoint
/// tiles. Tiles are the unit of parallel work; halo depths record how many
/// rows above/below a tile its stencil reads.
struct TilePlan {
  std::vector<TileRange> tiles;
  int haloTop = 0;
  int haloBottom = 0;

  int num_tiles() const { return static_cast<int>(tiles.size()); }
};

/// Flat offset of (i, j) in a row-major nx-wide grid.
inline std::ptrdiff_t linear_index(int i, int j, int nx) {
  assert(nx >= 1 && i >= 0 && i < nx && j >= 0);
  return static_cast<std::ptrdiff_t>(j) * nx + i;
}

/// Periodic wrap of a signed index into [0, n). Rejects n <= 0.
int wrap(std::int64_t i, int n);

/// Transposed copy: result(i, j) = g(j, i), with dx/dy exchanged.
Grid2D transpose(const Grid2D& g);

/// Transpose into a preallocated grid of the transposed shape.
void transpose_into(const Grid2D& g, Grid2D& out);

/// Split [0, ny) into numTiles contiguous row ranges, larger tiles first
/// (sizes ceil(ny/numTiles) then floor). Halo depths come from ext.
TilePlan make_tiles(int ny, int numTiles, const Extents& ext);

}  // namespace stengrid
