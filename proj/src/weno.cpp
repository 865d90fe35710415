#include "stengrid/weno.hpp"

#include "stengrid/worker_pool.hpp"

#include <stdexcept>

namespace stengrid {

namespace {

constexpr double kWenoEps = 1e-6;

double weno_combine(double v1, double v2, double v3, double v4, double v5) {
  const double c1 = v1 * (1.0 / 3.0) - v2 * (7.0 / 6.0) + v3 * (11.0 / 6.0);
  const double c2 = -v2 * (1.0 / 6.0) + v3 * (5.0 / 6.0) + v4 * (1.0 / 3.0);
  const double c3 = v3 * (1.0 / 3.0) + v4 * (5.0 / 6.0) - v5 * (1.0 / 6.0);

  const double d1 = v1 - 2.0 * v2 + v3;
  const double d2 = v2 - 2.0 * v3 + v4;
  const double d3 = v3 - 2.0 * v4 + v5;
  const double s1 = (13.0 / 12.0) * d1 * d1 + 0.25 * (v1 - 4.0 * v2 + 3.0 * v3) * (v1 - 4.0 * v2 + 3.0 * v3);
  const double s2 = (13.0 / 12.0) * d2 * d2 + 0.25 * (v2 - v4) * (v2 - v4);
  const double s3 = (13.0 / 12.0) * d3 * d3 + 0.25 * (3.0 * v3 - 4.0 * v4 + v5) * (3.0 * v3 - 4.0 * v4 + v5);

  const double a1 = 0.1 / ((kWenoEps + s1) * (kWenoEps + s1));
  const double a2 = 0.6 / ((kWenoEps + s2) * (kWenoEps + s2));
  const double a3 = 0.3 / ((kWenoEps + s3) * (kWenoEps + s3));
  return (a1 * c1 + a2 * c2 + a3 * c3) / (a1 + a2 + a3);
}

}  // namespace

double weno_derivative_7(const double* w7, double invH, UpwindSide side) {
  if (side == UpwindSide::Left) {
    const double v1 = (w7[1] - w7[0]) * invH;
    const double v2 = (w7[2] - w7[1]) * invH;
    const double v3 = (w7[3] - w7[2]) * invH;
    const double v4 = (w7[4] - w7[3]) * invH;
    const double v5 = (w7[5] - w7[4]) * invH;
    return weno_combine(v1, v2, v3, v4, v5);
  }
  const double v1 = (w7[6] - w7[5]) * invH;
  const double v2 = (w7[5] - w7[4]) * invH;
  const double v3 = (w7[4] - w7[3]) * invH;
  const double v4 = (w7[3] - w7[2]) * invH;
  const double v5 = (w7[2] - w7[1]) * invH;
  return weno_combine(v1, v2, v3, v4, v5);
}

Grid2D weno_advect(const Grid2D& phi, const VelocityField& vel, int numTiles, int numWorkers) {
  if (!phi.same_shape(vel.u) || !phi.same_shape(vel.v))
    throw std::invalid_argument("weno_advect: velocity shape does not match the field");
  if (phi.nx < 7 || phi.ny < 7) throw std::invalid_argument("weno_advect: need nx, ny >= 7");

  const int nx = phi.nx;
  const int ny = phi.ny;
  const double invDx = 1.0 / phi.dx;
  const double invDy = 1.0 / phi.dy;
  Grid2D out(nx, ny, phi.dx, phi.dy);

  const double* f = phi.data();
  const double* uu = vel.u.data();
  const double* vv = vel.v.data();
  double* o = out.data();

  const TilePlan tiles = make_tiles(ny, numTiles, Extents{0, 0, 3, 3});
  WorkerPool pool(numWorkers);
  pool.run(tiles.num_tiles(), [&](int t, int /*worker*/) {
    const TileRange& tile = tiles.tiles[static_cast<std::size_t>(t)];
    double wx[7];
    double wy[7];
    for (int j = tile.jBegin; j < tile.jEnd; ++j) {
      const std::ptrdiff_t row = static_cast<std::ptrdiff_t>(j) * nx;
      const bool yInterior = (j >= 3 && j + 3 < ny);
      std::ptrdiff_t rowBase[7];
      for (int q = 0; q < 7; ++q)
        rowBase[q] = static_cast<std::ptrdiff_t>(yInterior ? j - 3 + q : wrap(j - 3 + q, ny)) * nx;
      for (int i = 0; i < nx; ++i) {
        if (i >= 3 && i + 3 < nx) {
          for (int p = 0; p < 7; ++p) wx[p] = f[row + i - 3 + p];
        } else {
          for (int p = 0; p < 7; ++p) wx[p] = f[row + wrap(i - 3 + p, nx)];
        }
        for (int q = 0; q < 7; ++q) wy[q] = f[rowBase[q] + i];
        const double ui = uu[row + i];
        const double vi = vv[row + i];
        const double dpx = weno_derivative_7(wx, invDx, upwind_side(ui));
        const double dpy = weno_derivative_7(wy, invDy, upwind_side(vi));
        o[row + i] = -(ui * dpx + vi * dpy);
      }
    }
  });
  return out;
}

}  // namespace stengrid
