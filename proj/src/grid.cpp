#include "stengrid/grid.hpp"

#include <atomic>
#include <stdexcept>

namespace stengrid {

namespace detail {
namespace {
std::atomic<std::int64_t> g_large_allocs{0};
}

std::int64_t large_alloc_count() noexcept { return g_large_allocs.load(); }
void note_large_alloc() noexcept { g_large_allocs.fetch_add(1, std::memory_order_relaxed); }
}  // namespace detail

Grid2D::Grid2D(int nx_, int ny_, double dx_, double dy_)
    : nx(nx_), ny(ny_), dx(dx_), dy(dy_) {
  if (nx < 1 || ny < 1) throw std::invalid_argument("Grid2D: nx and ny must be >= 1");
  if (!(dx > 0.0) || !(dy > 0.0)) throw std::invalid_argument("Grid2D: dx and dy must be > 0");
  values.setZero(ny, nx);
  detail::note_large_alloc();
}

Grid2D::Grid2D(const Grid2D& other)
    : nx(other.nx), ny(other.ny), dx(other.dx), dy(other.dy), values(other.values) {
  if (values.size() > 0) detail::note_large_alloc();
}

Grid2D& Grid2D::operator=(const Grid2D& other) {
  if (this == &other) return *this;
  if (values.size() != other.values.size() && other.values.size() > 0)
    detail::note_large_alloc();
  nx = other.nx;
  ny = other.ny;
  dx = other.dx;
  dy = other.dy;
  values = other.values;
  return *this;
}

int wrap(std::int64_t i, int n) {
  if (n <= 0) throw std::invalid_argument("wrap: period must be >= 1");
  std::int64_t r = i % n;
  if (r < 0) r += n;
  return static_cast<int>(r);
}

Grid2D transpose(const Grid2D& g) {
  Grid2D out(g.ny, g.nx, g.dy, g.dx);
  transpose_into(g, out);
  return out;
}

void transpose_into(const Grid2D& g, Grid2D& out) {
  if (&out == &g) throw std::invalid_argument("transpose_into: output must not alias the input");
  if (out.nx != g.ny || out.ny != g.nx)
    throw std::invalid_argument("transpose_into: output shape must be the transposed input shape");
  out.values = g.values.transpose();
}

TilePlan make_tiles(int ny, int numTiles, const Extents& ext) {
  if (ny < 1) throw std::invalid_argument("make_tiles: ny must be >= 1");
  if (numTiles < 1 || numTiles > ny)
    throw std::invalid_argument("make_tiles: numTiles must satisfy 1 <= numTiles <= ny");
  if (!ext.valid()) throw std::invalid_argument("make_tiles: negative extents");

  TilePlan plan;
  plan.haloTop = ext.top;
  plan.haloBottom = ext.bottom;
  plan.tiles.reserve(static_cast<std::size_t>(numTiles));

  const int base = ny / numTiles;
  const int extra = ny % numTiles;  // first `extra` tiles get one more row
  int j = 0;
  for (int t = 0; t < numTiles; ++t) {
    const int rows = base + (t < extra ? 1 : 0);
    plan.tiles.push_back(TileRange{j, j + rows});
    j += rows;
  }
  return plan;
}

}  // namespace stengrid
