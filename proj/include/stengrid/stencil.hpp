#pragma once

#include "stengrid/grid.hpp"
#include "stengrid/worker_pool.hpp"

#include <memory>
#include <variant>
#include <vector>

namespace stengrid {

/// Linear stencil: weights cover the window row-major, origin at the top
/// left, sweeping left to right in i, row by row in j. Length is
/// width*height for the stencil's extents.
struct WeightStencil {
  Extents ext;
  std::vector<double> weights;
};

/// Window callback for function stencils. `window` exposes the stencil
/// window in the same row-major ordering as WeightStencil weights; entry
/// (p, q) is window[q*rowStride + p]. The engine may pass either a packed
/// copy (rowStride == window width) or a strided view into the field
/// (rowStride == nx). Must be pure and deterministic.
using StencilFunction = double (*)(const double* window, const double* coe, int rowStride);

/// Stencil evaluated by a user function over the gathered window, with a
/// caller-supplied coefficient array (e.g. 1/dx^2 factors).
struct FunctionStencil {
  Extents ext;
  StencilFunction fn = nullptr;
  std::vector<double> coe;
};

enum class Direction { X, Y, XY };

/// Residency hint carried over from the GPU-era API; a no-op on the CPU.
enum class Residency { Host, Device };

using StencilKind = std::variant<WeightStencil, FunctionStencil>;

/// A validated, ready-to-run stencil application: direction, boundary mode,
/// stencil, tile decomposition and input/output field bindings. The plan
/// never owns the fields; it owns its worker pool (unless sharing one) and
/// per-worker scratch. Movable, not copyable.
class StencilPlan {
 public:
  StencilPlan() = default;
  StencilPlan(StencilPlan&&) noexcept = default;
  StencilPlan& operator=(StencilPlan&&) noexcept = default;
  StencilPlan(const StencilPlan&) = delete;
  StencilPlan& operator=(const StencilPlan&) = delete;
  ~StencilPlan() { destroy(); }

  bool valid() const { return input_ != nullptr; }
  Direction direction() const { return direction_; }
  BoundaryMode mode() const { return mode_; }
  const Extents& extents() const { return ext_; }
  const TilePlan& tiles() const { return tiles_; }
  int num_workers() const { return numWorkers_; }
  const Grid2D* input() const { return input_; }
  const Grid2D* output() const { return output_; }

  /// Release plan-owned resources; the bound fields stay caller-owned.
  /// Safe to call twice.
  void destroy();

 private:
  friend StencilPlan create_plan(Direction, BoundaryMode, StencilKind, Grid2D&, Grid2D&, int,
                                 int, WorkerPool*);
  friend void swap_plan(StencilPlan&);
  friend void compute(StencilPlan&, Residency);

  Direction direction_ = Direction::X;
  BoundaryMode mode_ = BoundaryMode::Periodic;
  Extents ext_;
  StencilKind kind_;
  TilePlan tiles_;
  Grid2D* input_ = nullptr;
  Grid2D* output_ = nullptr;
  int numWorkers_ = 1;
  WorkerPool* pool_ = nullptr;
  std::unique_ptr<WorkerPool> ownedPool_;
  std::vector<std::vector<double>> scratch_;  // one gather buffer per worker
};

/// Validate and assemble a plan. `sharedPool`, when given, must have
/// numWorkers workers and outlive the plan; otherwise the plan owns a pool.
/// No computation happens here.
StencilPlan create_plan(Direction direction, BoundaryMode mode, StencilKind kind, Grid2D& input,
                        Grid2D& output, int numTiles, int numWorkers,
                        WorkerPool* sharedPool = nullptr);

/// Undo create_plan. Idempotent; does not touch the bound fields.
void destroy_plan(StencilPlan& plan);

/// Exchange the input and output bindings.
void swap_plan(StencilPlan& plan);

/// Apply the stencil over the grid, in parallel over tiles. In NonPeriodic
/// mode the boundary frame of the output is left untouched; in Periodic mode
/// every point is computed with wrapped indices.
void compute(StencilPlan& plan, Residency hint = Residency::Host);

/// Reference single-point evaluation: sum of weight(p,q)*input(i-left+p,
/// j-top+q) accumulated row-major over the window, wrapping iff Periodic.
/// compute() is bitwise consistent with this.
double apply_weights_at(const Grid2D& input, const WeightStencil& sten, int i, int j,
                        BoundaryMode mode);

/// Reference single-point evaluation of a function stencil: gathers the
/// window packed (rowStride = width) and invokes fn.
double apply_function_at(const Grid2D& input, const FunctionStencil& sten, int i, int j,
                         BoundaryMode mode);

}  // namespace stengrid
