#pragma once

#include "stengrid/grid.hpp"
#include "stengrid/penta.hpp"
#include "stengrid/stencil.hpp"
#include "stengrid/worker_pool.hpp"

#include <cstdint>
#include <functional>
#include <numbers>
#include <vector>

namespace stengrid {

/// Cahn-Hilliard run configuration. The model is
///   dC/dt = D * lap(C^3 - C - gamma * lap C)
/// on the periodic box [0,lx) x [0,ly), discretized with second-order
/// central differences and stepped by the BDF2-ADI splitting
///   Lx w = -(2/3)(C^n - C^{n-1}) - (2/3) D gamma dt bih(Cbar)
///          + (2/3) D dt lap(C^3 - C)^n
///   Ly v = w,   C^{n+1} = Cbar + v,   Cbar = 2 C^n - C^{n-1},
/// with Lx = I + (2/3) D gamma dt d4/dx4 and likewise Ly.
struct CHParams {
  double D = 1.0;
  double gamma = 0.01;
  int nx = 512;
  int ny = 512;
  double lx = 2.0 * std::numbers::pi;
  double ly = 2.0 * std::numbers::pi;
  double dt = 0.0;
  double T = 0.0;
  std::uint64_t seed = 1;
  double icAmplitude = 0.1;
  bool nonlinearEnabled = true;  // diagnostic switch: drop the lap(C^3-C) term

  double dx() const { return lx / nx; }
  double dy() const { return ly / ny; }
  void validate() const;
};

struct Diagnostics {
  double t = 0.0;
  double s = 0.0;
  double k1Inv = 0.0;
};

/// SplitMix64: the reproducible seed-to-field generator used for initial
/// conditions. Identical output on every platform for a given seed.
struct SplitMix64 {
  std::uint64_t state;

  explicit SplitMix64(std::uint64_t seed) : state(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1), 53-bit resolution.
  double next_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
};

/// i.i.d. uniform samples in [-icAmplitude, +icAmplitude], filled row-major
/// from SplitMix64(seed). The deep-quench initial state.
Grid2D initial_condition(const CHParams& params);

/// lap(c^3 - c) with periodic wrap, realized as a 3x3 function stencil whose
/// coefficients are the 5-point Laplacian weights (the cube is evaluated
/// inside the window function).
Grid2D nonlinear_term(const Grid2D& c);

/// bih(c) = c_xxxx + 2 c_xxyy + c_yyyy as one periodic 5x5 weight stencil
/// (13 nonzero entries). Requires nx, ny >= 5.
Grid2D biharmonic(const Grid2D& c);

/// The 5x5 biharmonic weights, row-major. The center entry is nudged at the
/// last-ulp level so the row-major sum of the array is exactly zero.
std::vector<double> biharmonic_weights(double dx, double dy);

/// The 3x3 coefficient array handed to the nonlinear window function.
std::vector<double> nonlinear_laplacian_coefficients(double dx, double dy);

/// The RHS of the Lx sweep; cBar is the extrapolated state 2 C^n - C^{n-1}.
Grid2D assemble_rhs(const Grid2D& cCurr, const Grid2D& cPrev, const Grid2D& cBar,
                    const CHParams& params);

/// Domain average by tensor-product composite Simpson over the periodically
/// closed grid (the wrapped first row/column closes the interval count).
/// Requires even nx, ny.
double simpson_mean(const Grid2D& g);

/// s = 1 / (1 - <C^2>). Throws once <C^2> reaches 1 (saturated mixture).
double s_metric(const Grid2D& c);

/// k1 = sum |Chat|^2 / sum |k|^{-1} |Chat|^2 over FFT modes, k = 0 excluded.
/// Wavenumbers are signed/folded integers scaled by 2*pi/l per direction.
/// Throws on an all-zero field.
double k1_metric(const Grid2D& c);

/// BDF2-ADI time stepper. Owns the fields, both pentadiagonal factorizations,
/// the stencil plans and the worker pool; step() allocates nothing.
class CHStepper {
 public:
  CHStepper(const CHParams& params, int numTiles = 1, int numWorkers = 1);

  /// Advance one dt: extrapolate, assemble the RHS, x sweep, transpose,
  /// y sweep, transpose back, combine, rotate the time levels.
  void step();

  /// Replace both time levels (C^{n-1} := prev, C^n := curr) and reset the
  /// step counter; shapes must match the configured grid.
  void set_state(const Grid2D& curr, const Grid2D& prev);

  int step_index() const { return step_; }
  double time() const { return time_; }
  const CHParams& params() const { return params_; }
  const Grid2D& field() const { return cCurr_; }
  const Grid2D& previous_field() const { return cPrev_; }

  Diagnostics diagnostics() const;

 private:
  template <typename Body>
  void parallel_rows(Body&& body);

  CHParams params_;
  WorkerPool pool_;
  TilePlan rowTiles_;
  Grid2D cCurr_, cPrev_, cBar_, nl_, bih_, rhs_, w_, wT_, vT_, v_;
  RhsBatch xBatch_, yBatch_;
  PeriodicPentaFactor fx_, fy_;
  StencilPlan nlPlan_, bihPlan_;
  int step_ = 0;
  double time_ = 0.0;
};

/// Output hooks for run(): cadences are in steps, 0 disables. Step 0 (the
/// initial state) is always emitted when the corresponding hook is enabled.
struct RunSink {
  int diagEvery = 1;
  int snapEvery = 0;
  std::function<void(const Diagnostics&)> onDiagnostics;
  std::function<void(const Grid2D&, int step, double t)> onSnapshot;
};

/// Initialize from params and step to T (ceil(T/dt) steps), feeding the sink.
void run(const CHParams& params, int numTiles, int numWorkers, const RunSink& sink);

}  // namespace stengrid
