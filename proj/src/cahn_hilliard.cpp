#include "stengrid/cahn_hilliard.hpp"

#include "stengrid/fft.hpp"

#include <cmath>
#include <stdexcept>

namespace stengrid {

namespace {

constexpr double kTwoThirds = 2.0 / 3.0;

double pow4(double h) {
  const double h2 = h * h;
  return h2 * h2;
}

double hyperdiffusion_sigma(const CHParams& p, double h) {
  return kTwoThirds * p.D * p.gamma * p.dt / pow4(h);
}

/// RHS combination constants; shared by CHStepper and assemble_rhs so both
/// paths perform identical arithmetic.
struct RhsCoeffs {
  double kDiff;  // on (C^n - C^{n-1})
  double kBih;   // on bih(Cbar)
  double kNl;    // on lap(C^3 - C)

  explicit RhsCoeffs(const CHParams& p)
      : kDiff(-kTwoThirds),
        kBih(kTwoThirds * p.D * p.gamma * p.dt),
        kNl(kTwoThirds * p.D * p.dt) {}
};

double ch_nonlinear_window(const double* window, const double* coe, int rowStride) {
  double acc = 0.0;
  for (int q = 0; q < 3; ++q) {
    const double* row = window + static_cast<std::ptrdiff_t>(q) * rowStride;
    const double* cr = coe + q * 3;
    for (int p = 0; p < 3; ++p) {
      const double v = row[p];
      acc += cr[p] * (v * v * v - v);
    }
  }
  return acc;
}

CHParams validated(CHParams p) {
  p.validate();
  return p;
}

}  // namespace

void CHParams::validate() const {
  if (!(D > 0.0)) throw std::invalid_argument("CHParams: D must be > 0");
  if (!(gamma > 0.0)) throw std::invalid_argument("CHParams: gamma must be > 0");
  if (!(dt > 0.0)) throw std::invalid_argument("CHParams: dt must be > 0");
  if (!(T > 0.0)) throw std::invalid_argument("CHParams: T must be > 0");
  if (!(lx > 0.0) || !(ly > 0.0)) throw std::invalid_argument("CHParams: lx, ly must be > 0");
  if (!is_power_of_two(nx) || !is_power_of_two(ny))
    throw std::invalid_argument("CHParams: nx and ny must be powers of two");
  if (nx < 8 || ny < 8) throw std::invalid_argument("CHParams: grid too small (need >= 8)");
  if (!(icAmplitude >= 0.0)) throw std::invalid_argument("CHParams: icAmplitude must be >= 0");
}

Grid2D initial_condition(const CHParams& params) {
  Grid2D g(params.nx, params.ny, params.dx(), params.dy());
  SplitMix64 rng(params.seed);
  double* v = g.data();
  const std::ptrdiff_t count = g.size();
  const double amp = params.icAmplitude;
  for (std::ptrdiff_t k = 0; k < count; ++k) v[k] = amp * (2.0 * rng.next_unit() - 1.0);
  return g;
}

std::vector<double> nonlinear_laplacian_coefficients(double dx, double dy) {
  const double cx = 1.0 / (dx * dx);
  const double cy = 1.0 / (dy * dy);
  const double cc = -2.0 * cx - 2.0 * cy;
  return {0.0, cy, 0.0, cx, cc, cx, 0.0, cy, 0.0};
}

std::vector<double> biharmonic_weights(double dx, double dy) {
  const double ax = 1.0 / pow4(dx);
  const double ay = 1.0 / pow4(dy);
  const double cr = 2.0 / ((dx * dx) * (dy * dy));
  std::vector<double> w(25, 0.0);
  auto at = [&w](int p, int q) -> double& { return w[static_cast<std::size_t>(q) * 5 + p]; };
  // d4/dx4 along the center row
  at(0, 2) += ax;
  at(1, 2) += -4.0 * ax;
  at(2, 2) += 6.0 * ax;
  at(3, 2) += -4.0 * ax;
  at(4, 2) += ax;
  // d4/dy4 along the center column
  at(2, 0) += ay;
  at(2, 1) += -4.0 * ay;
  at(2, 2) += 6.0 * ay;
  at(2, 3) += -4.0 * ay;
  at(2, 4) += ay;
  // 2 * d4/dx2dy2, the 3x3 cross block
  static constexpr double cross[9] = {1.0, -2.0, 1.0, -2.0, 4.0, -2.0, 1.0, -2.0, 1.0};
  for (int q = 0; q < 3; ++q)
    for (int p = 0; p < 3; ++p) at(p + 1, q + 1) += cross[q * 3 + p] * cr;
  // The last nonzero entry absorbs the rounding residual of the row-major
  // prefix sum: the full weight array must sum to exactly zero. Adjustment
  // is below one ulp of the largest weight.
  double prefix = 0.0;
  for (int k = 0; k < 22; ++k) prefix += w[static_cast<std::size_t>(k)];
  at(2, 4) = -prefix;
  return w;
}

Grid2D nonlinear_term(const Grid2D& c) {
  Grid2D out(c.nx, c.ny, c.dx, c.dy);
  FunctionStencil fs{Extents{1, 1, 1, 1}, &ch_nonlinear_window,
                     nonlinear_laplacian_coefficients(c.dx, c.dy)};
  // compute() only reads the input binding
  StencilPlan plan = create_plan(Direction::XY, BoundaryMode::Periodic, fs,
                                 const_cast<Grid2D&>(c), out, 1, 1);
  compute(plan);
  return out;
}

Grid2D biharmonic(const Grid2D& c) {
  if (c.nx < 5 || c.ny < 5) throw std::invalid_argument("biharmonic: need nx, ny >= 5");
  Grid2D out(c.nx, c.ny, c.dx, c.dy);
  WeightStencil ws{Extents{2, 2, 2, 2}, biharmonic_weights(c.dx, c.dy)};
  StencilPlan plan = create_plan(Direction::XY, BoundaryMode::Periodic, ws,
                                 const_cast<Grid2D&>(c), out, 1, 1);
  compute(plan);
  return out;
}

Grid2D assemble_rhs(const Grid2D& cCurr, const Grid2D& cPrev, const Grid2D& cBar,
                    const CHParams& params) {
  if (!cCurr.same_shape(cPrev) || !cCurr.same_shape(cBar))
    throw std::invalid_argument("assemble_rhs: grids must share one shape");
  const RhsCoeffs k(params);
  const Grid2D bih = biharmonic(cBar);
  Grid2D out(cCurr.nx, cCurr.ny, cCurr.dx, cCurr.dy);
  const double* cc = cCurr.data();
  const double* cp = cPrev.data();
  const double* bh = bih.data();
  double* o = out.data();
  const std::ptrdiff_t count = out.size();
  if (params.nonlinearEnabled) {
    const Grid2D nl = nonlinear_term(cCurr);
    const double* nv = nl.data();
    for (std::ptrdiff_t i = 0; i < count; ++i)
      o[i] = k.kDiff * (cc[i] - cp[i]) - k.kBih * bh[i] + k.kNl * nv[i];
  } else {
    for (std::ptrdiff_t i = 0; i < count; ++i)
      o[i] = k.kDiff * (cc[i] - cp[i]) - k.kBih * bh[i];
  }
  return out;
}

double simpson_mean(const Grid2D& g) {
  if (g.nx % 2 != 0 || g.ny % 2 != 0)
    throw std::invalid_argument("simpson_mean: nx and ny must be even");
  const double* v = g.data();
  double total = 0.0;
  for (int j = 0; j < g.ny; ++j) {
    const double* row = v + static_cast<std::ptrdiff_t>(j) * g.nx;
    double rowAcc = 0.0;
    for (int i = 0; i < g.nx; ++i) {
      const double wx = (i % 2 == 1) ? 4.0 : 2.0;
      rowAcc += wx * row[i];
    }
    const double wy = (j % 2 == 1) ? 4.0 : 2.0;
    total += wy * rowAcc;
  }
  return total / (9.0 * static_cast<double>(g.nx) * static_cast<double>(g.ny));
}

double s_metric(const Grid2D& c) {
  Grid2D sq(c.nx, c.ny, c.dx, c.dy);
  const double* v = c.data();
  double* o = sq.data();
  const std::ptrdiff_t count = c.size();
  for (std::ptrdiff_t i = 0; i < count; ++i) o[i] = v[i] * v[i];
  const double m2 = simpson_mean(sq);
  if (m2 >= 1.0 - 1e-12) throw std::domain_error("s_metric: mixture saturated, <C^2> reached 1");
  return 1.0 / (1.0 - m2);
}

double k1_metric(const Grid2D& c) {
  const Spectrum s = fft_2d(c);
  const int nx = c.nx;
  const int ny = c.ny;
  const double kxScale = 2.0 * std::numbers::pi / (c.dx * nx);
  const double kyScale = 2.0 * std::numbers::pi / (c.dy * ny);
  double num = 0.0;
  double den = 0.0;
  for (int j = 0; j < ny; ++j) {
    const int mj = (j < ny / 2) ? j : j - ny;
    for (int i = 0; i < nx; ++i) {
      if (i == 0 && j == 0) continue;  // |k|^{-1} is singular at the origin
      const int mi = (i < nx / 2) ? i : i - nx;
      const double power = std::norm(s(j, i));
      const double kmag = std::hypot(kxScale * mi, kyScale * mj);
      num += power;
      den += power / kmag;
    }
  }
  if (den == 0.0) throw std::domain_error("k1_metric: zero field has no spectral mean");
  return num / den;
}

CHStepper::CHStepper(const CHParams& params, int numTiles, int numWorkers)
    : params_(validated(params)),
      pool_(numWorkers),
      rowTiles_(make_tiles(params_.ny, numTiles, Extents{})),
      cCurr_(initial_condition(params_)),
      cPrev_(cCurr_),
      cBar_(params_.nx, params_.ny, params_.dx(), params_.dy()),
      nl_(cBar_),
      bih_(cBar_),
      rhs_(cBar_),
      w_(cBar_),
      wT_(params_.ny, params_.nx, params_.dy(), params_.dx()),
      vT_(wT_),
      v_(cBar_),
      xBatch_(params_.ny, params_.nx),
      yBatch_(params_.nx, params_.ny),
      fx_(build_hyperdiffusion_operator(hyperdiffusion_sigma(params_, params_.dx()), params_.nx,
                                        params_.ny, true)),
      fy_(build_hyperdiffusion_operator(hyperdiffusion_sigma(params_, params_.dy()), params_.ny,
                                        params_.nx, true)) {
  nlPlan_ = create_plan(Direction::XY, BoundaryMode::Periodic,
                        FunctionStencil{Extents{1, 1, 1, 1}, &ch_nonlinear_window,
                                        nonlinear_laplacian_coefficients(params_.dx(), params_.dy())},
                        cCurr_, nl_, numTiles, numWorkers, &pool_);
  bihPlan_ = create_plan(Direction::XY, BoundaryMode::Periodic,
                         WeightStencil{Extents{2, 2, 2, 2},
                                       biharmonic_weights(params_.dx(), params_.dy())},
                         cBar_, bih_, numTiles, numWorkers, &pool_);
}

template <typename Body>
void CHStepper::parallel_rows(Body&& body) {
  pool_.run(rowTiles_.num_tiles(), [&](int t, int /*worker*/) {
    const TileRange& r = rowTiles_.tiles[static_cast<std::size_t>(t)];
    body(r.jBegin, r.jEnd);
  });
}

void CHStepper::set_state(const Grid2D& curr, const Grid2D& prev) {
  if (curr.nx != params_.nx || curr.ny != params_.ny || !curr.same_shape(prev))
    throw std::invalid_argument("CHStepper::set_state: shape mismatch");
  cCurr_.values = curr.values;
  cPrev_.values = prev.values;
  step_ = 0;
  time_ = 0.0;
}

void CHStepper::step() {
  const int nx = params_.nx;
  const RhsCoeffs k(params_);

  // Cbar = 2 C^n - C^{n-1}
  {
    const double* cc = cCurr_.data();
    const double* cp = cPrev_.data();
    double* cb = cBar_.data();
    parallel_rows([&](int jb, int je) {
      for (std::ptrdiff_t i = static_cast<std::ptrdiff_t>(jb) * nx,
                          end = static_cast<std::ptrdiff_t>(je) * nx;
           i < end; ++i)
        cb[i] = 2.0 * cc[i] - cp[i];
    });
  }

  if (params_.nonlinearEnabled) compute(nlPlan_);
  compute(bihPlan_);

  {
    const double* cc = cCurr_.data();
    const double* cp = cPrev_.data();
    const double* bh = bih_.data();
    const double* nv = nl_.data();
    double* o = rhs_.data();
    const bool nonlinear = params_.nonlinearEnabled;
    parallel_rows([&](int jb, int je) {
      const std::ptrdiff_t lo = static_cast<std::ptrdiff_t>(jb) * nx;
      const std::ptrdiff_t hi = static_cast<std::ptrdiff_t>(je) * nx;
      if (nonlinear) {
        for (std::ptrdiff_t i = lo; i < hi; ++i)
          o[i] = k.kDiff * (cc[i] - cp[i]) - k.kBih * bh[i] + k.kNl * nv[i];
      } else {
        for (std::ptrdiff_t i = lo; i < hi; ++i) o[i] = k.kDiff * (cc[i] - cp[i]) - k.kBih * bh[i];
      }
    });
  }

  // Lx sweep: ny periodic systems of nx unknowns.
  interleave_into(rhs_, Axis::X, xBatch_);
  fx_.solve_in_place(xBatch_, &pool_);
  deinterleave_into(xBatch_, Axis::X, w_);

  // Ly sweep on the transposed field: nx systems of ny unknowns.
  transpose_into(w_, wT_);
  interleave_into(wT_, Axis::X, yBatch_);
  fy_.solve_in_place(yBatch_, &pool_);
  deinterleave_into(yBatch_, Axis::X, vT_);
  transpose_into(vT_, v_);

  // C^{n+1} = Cbar + v, then rotate the time levels.
  {
    const double* cb = cBar_.data();
    const double* vv = v_.data();
    double* cn = nl_.data();  // reuse as next-step scratch
    parallel_rows([&](int jb, int je) {
      for (std::ptrdiff_t i = static_cast<std::ptrdiff_t>(jb) * nx,
                          end = static_cast<std::ptrdiff_t>(je) * nx;
           i < end; ++i)
        cn[i] = cb[i] + vv[i];
    });
    cPrev_.values.swap(cCurr_.values);
    cCurr_.values.swap(nl_.values);
  }

  ++step_;
  time_ = static_cast<double>(step_) * params_.dt;
}

Diagnostics CHStepper::diagnostics() const {
  Diagnostics d;
  d.t = time_;
  d.s = s_metric(cCurr_);
  try {
    d.k1Inv = 1.0 / k1_metric(cCurr_);
  } catch (const std::domain_error&) {
    d.k1Inv = 0.0;  // an identically zero field has no spectral length scale
  }
  return d;
}

void run(const CHParams& params, int numTiles, int numWorkers, const RunSink& sink) {
  CHStepper stepper(params, numTiles, numWorkers);
  const auto emit = [&](int step) {
    if (sink.diagEvery > 0 && sink.onDiagnostics && step % sink.diagEvery == 0)
      sink.onDiagnostics(stepper.diagnostics());
    if (sink.snapEvery > 0 && sink.onSnapshot && step % sink.snapEvery == 0)
      sink.onSnapshot(stepper.field(), step, stepper.time());
  };
  emit(0);
  const auto steps = static_cast<long>(std::ceil(params.T / params.dt - 1e-9));
  for (long s = 1; s <= steps; ++s) {
    stepper.step();
    emit(static_cast<int>(s));
  }
}

}  // namespace stengrid
