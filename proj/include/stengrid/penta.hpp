#pragma once

#include "stengrid/grid.hpp"
#include "stengrid/worker_pool.hpp"

#include <Eigen/Core>

#include <stdexcept>

namespace stengrid {

/// Batched pentadiagonal systems in interleaved layout: entry (system b,
/// row r) of every array sits at r*batchCount + b, so at a fixed row all
/// systems are adjacent. In the periodic case the otherwise out-of-band
/// slots hold the cyclic wrap couplings:
///   secondSub(b,0), sub(b,0)          -> row 0, columns n-2 and n-1
///   secondSub(b,1)                    -> row 1, column n-1
///   secondSuper(b,n-2)                -> row n-2, column 0
///   super(b,n-1), secondSuper(b,n-1)  -> row n-1, columns 0 and 1
/// Non-periodic solves ignore those slots.
struct PentaBatch {
  int batchCount = 0;
  int n = 0;
  bool periodic = false;
  Eigen::ArrayXd secondSub, sub, diag, super, secondSuper;

  PentaBatch() = default;
  PentaBatch(int batchCount_, int n_, bool periodic_);

  std::ptrdiff_t idx(int b, int r) const {
    return static_cast<std::ptrdiff_t>(r) * batchCount + b;
  }
};

/// Right-hand sides (or solutions) for a PentaBatch, same interleaved layout.
struct RhsBatch {
  int batchCount = 0;
  int n = 0;
  Eigen::ArrayXd values;

  RhsBatch() = default;
  RhsBatch(int batchCount_, int n_);

  std::ptrdiff_t idx(int b, int r) const {
    return static_cast<std::ptrdiff_t>(r) * batchCount + b;
  }
  double at(int b, int r) const { return values[idx(b, r)]; }
  double& at(int b, int r) { return values[idx(b, r)]; }
};

struct PentaSolveError : std::runtime_error {
  int system;
  PentaSolveError(const std::string& what, int system_)
      : std::runtime_error(what), system(system_) {}
};

/// Non-pivoting LU factorization of the non-periodic bands, reusable across
/// right-hand sides. Each system is eliminated independently and
/// sequentially; the batch dimension is the inner (contiguous) loop.
class PentaFactor {
 public:
  explicit PentaFactor(const PentaBatch& m);

  int batch_count() const { return batchCount_; }
  int size() const { return n_; }

  void solve_in_place(RhsBatch& rhs, WorkerPool* pool = nullptr) const;

 private:
  friend class PeriodicPentaFactor;

  void solve_range(RhsBatch& rhs, int b0, int b1) const;

  int batchCount_ = 0;
  int n_ = 0;
  Eigen::ArrayXd m1_, m2_, dInv_, ap_, bp_;
};

/// Cyclic solver: splits A = P + U V^T with P the corner-stripped core and
/// U, V carrying the six wrap entries over four rows, then applies the
/// Woodbury identity with a per-system 4x4 capacitance solve. The four
/// auxiliary core solves and the capacitance factorization happen once here.
class PeriodicPentaFactor {
 public:
  explicit PeriodicPentaFactor(const PentaBatch& m);

  int batch_count() const { return core_.batch_count(); }
  int size() const { return core_.size(); }

  void solve_in_place(RhsBatch& rhs, WorkerPool* pool = nullptr) const;

 private:
  void correct_range(RhsBatch& rhs, int b0, int b1) const;

  PentaFactor core_;
  Eigen::ArrayXd corners_;        // 6 per system: cw1..cw6, system-minor
  Eigen::ArrayXd w_[4];           // P^{-1} e_{0,1,n-2,n-1}, interleaved
  Eigen::ArrayXd capLu_;          // 16 per system
  Eigen::Array<int, Eigen::Dynamic, 1> capPiv_;  // 4 per system
};

/// Solve the non-periodic batch; the returned batch holds the solutions.
RhsBatch solve_batch(const PentaBatch& m, RhsBatch rhs, WorkerPool* pool = nullptr);

/// Solve the cyclic batch via the Woodbury corner correction.
RhsBatch solve_periodic_batch(const PentaBatch& m, RhsBatch rhs, WorkerPool* pool = nullptr);

/// Rows {sigma, -4 sigma, 1 + 6 sigma, -4 sigma, sigma}: the operator
/// I + sigma * d4 with the five-point fourth-difference weights {1,-4,6,-4,1},
/// cyclic iff periodic. sigma = (2/3) * D * gamma * dt / dx^4 in the ADI use.
PentaBatch build_hyperdiffusion_operator(double sigma, int n, int batchCount, bool periodic);

enum class Axis { X, Y };

/// Pack a grid as batched systems. Axis::X: one system per row j
/// (batchCount = ny systems of n = nx unknowns); Axis::Y: one system per
/// column i (batchCount = nx systems of n = ny unknowns).
RhsBatch interleave(const Grid2D& g, Axis axis);
void interleave_into(const Grid2D& g, Axis axis, RhsBatch& out);

/// Inverse of interleave; dx/dy re-attach grid metadata.
Grid2D deinterleave(const RhsBatch& rhs, Axis axis, double dx, double dy);
void deinterleave_into(const RhsBatch& rhs, Axis axis, Grid2D& out);

}  // namespace stengrid
