#pragma once

#include "stengrid/grid.hpp"

namespace stengrid {

/// Advecting velocity components; shapes must match the advected field.
struct VelocityField {
  Grid2D u;
  Grid2D v;
};

enum class UpwindSide { Left, Right };

/// Bias selection: left-biased for velocity >= 0, right-biased for < 0.
inline UpwindSide upwind_side(double velocity) {
  return velocity < 0.0 ? UpwindSide::Right : UpwindSide::Left;
}

/// Fifth-order WENO upwind derivative from the 7-point window
/// w7[0..6] = phi(x - 3h .. x + 3h). invH = 1/h. eps = 1e-6 and ideal
/// weights {0.1, 0.6, 0.3} per the standard construction.
double weno_derivative_7(const double* w7, double invH, UpwindSide side);

/// The advection term -(u dphi/dx + v dphi/dy) with WENO5 upwinded
/// derivatives on a periodic grid. Requires nx, ny >= 7.
Grid2D weno_advect(const Grid2D& phi, const VelocityField& vel, int numTiles = 1,
                   int numWorkers = 1);

}  // namespace stengrid
