#include "stengrid/penta.hpp"

#include <algorithm>
#include <cmath>

namespace stengrid {

namespace {

void check_shapes(int batchCount, int n) {
  if (batchCount < 1) throw std::invalid_argument("penta: batchCount must be >= 1");
  if (n < 5) throw std::invalid_argument("penta: systems need n >= 5");
}

void check_rhs(const RhsBatch& rhs, int batchCount, int n, const char* who) {
  if (rhs.batchCount != batchCount || rhs.n != n)
    throw std::invalid_argument(std::string(who) + ": rhs shape does not match the operator");
}

/// Partition [0, batchCount) over the pool and run fn(b0, b1) per chunk.
template <typename Fn>
void for_batch_chunks(int batchCount, WorkerPool* pool, Fn&& fn) {
  if (pool == nullptr || pool->workers() == 1) {
    fn(0, batchCount);
    return;
  }
  const int chunks = std::min(pool->workers(), batchCount);
  const int base = batchCount / chunks;
  const int extra = batchCount % chunks;
  pool->run(chunks, [&](int c, int /*worker*/) {
    const int b0 = c * base + std::min(c, extra);
    const int b1 = b0 + base + (c < extra ? 1 : 0);
    fn(b0, b1);
  });
}

void lu4_factor(double* K, int* piv, int system) {
  for (int c = 0; c < 4; ++c) {
    int pr = c;
    double best = std::abs(K[c * 4 + c]);
    for (int r = c + 1; r < 4; ++r) {
      const double cand = std::abs(K[r * 4 + c]);
      if (cand > best) {
        best = cand;
        pr = r;
      }
    }
    if (best == 0.0) throw PentaSolveError("penta: singular capacitance matrix", system);
    piv[c] = pr;
    if (pr != c)
      for (int cc = 0; cc < 4; ++cc) std::swap(K[c * 4 + cc], K[pr * 4 + cc]);
    const double inv = 1.0 / K[c * 4 + c];
    for (int r = c + 1; r < 4; ++r) {
      const double m = K[r * 4 + c] * inv;
      K[r * 4 + c] = m;
      for (int cc = c + 1; cc < 4; ++cc) K[r * 4 + cc] -= m * K[c * 4 + cc];
    }
  }
}

void lu4_solve(const double* K, const int* piv, double* y) {
  for (int c = 0; c < 4; ++c)
    if (piv[c] != c) std::swap(y[c], y[piv[c]]);
  for (int r = 1; r < 4; ++r)
    for (int c = 0; c < r; ++c) y[r] -= K[r * 4 + c] * y[c];
  for (int r = 3; r >= 0; --r) {
    for (int c = r + 1; c < 4; ++c) y[r] -= K[r * 4 + c] * y[c];
    y[r] /= K[r * 4 + r];
  }
}

}  // namespace

PentaBatch::PentaBatch(int batchCount_, int n_, bool periodic_)
    : batchCount(batchCount_), n(n_), periodic(periodic_) {
  check_shapes(batchCount, n);
  const auto len = static_cast<Eigen::Index>(batchCount) * n;
  secondSub.setZero(len);
  sub.setZero(len);
  diag.setZero(len);
  super.setZero(len);
  secondSuper.setZero(len);
  detail::note_large_alloc();
}

RhsBatch::RhsBatch(int batchCount_, int n_) : batchCount(batchCount_), n(n_) {
  if (batchCount < 1 || n < 1)
    throw std::invalid_argument("RhsBatch: batchCount and n must be >= 1");
  values.setZero(static_cast<Eigen::Index>(batchCount) * n);
  detail::note_large_alloc();
}

PentaFactor::PentaFactor(const PentaBatch& m) : batchCount_(m.batchCount), n_(m.n) {
  check_shapes(batchCount_, n_);
  const int B = batchCount_;
  const int n = n_;
  const auto len = static_cast<Eigen::Index>(B) * n;
  m1_.setZero(len);
  m2_.setZero(len);
  dInv_.setZero(len);
  ap_.setZero(len);
  bp_ = m.secondSuper;  // b' rows are untouched by the elimination
  detail::note_large_alloc();

  // Work arrays hold the transformed diagonal/superdiagonal per row.
  Eigen::ArrayXd dp(len);

  const double* e = m.secondSub.data();
  const double* c = m.sub.data();
  const double* d = m.diag.data();
  const double* a = m.super.data();
  double* bp = bp_.data();
  double* ap = ap_.data();
  double* dpv = dp.data();
  double* m1 = m1_.data();
  double* m2 = m2_.data();
  double* dInv = dInv_.data();

  auto pivot_check = [&](int r) {
    const double* row = dpv + static_cast<std::ptrdiff_t>(r) * B;
    for (int b = 0; b < B; ++b)
      if (row[b] == 0.0) throw PentaSolveError("penta: zero pivot during elimination", b);
  };

  // r = 0
  for (int b = 0; b < B; ++b) {
    dpv[b] = d[b];
    ap[b] = a[b];
  }
  pivot_check(0);
  // r = 1
  {
    const std::ptrdiff_t r1 = B;
    for (int b = 0; b < B; ++b) {
      const double mm = c[r1 + b] / dpv[b];
      m2[r1 + b] = mm;
      dpv[r1 + b] = d[r1 + b] - mm * ap[b];
      ap[r1 + b] = a[r1 + b] - mm * bp[b];
    }
    pivot_check(1);
  }
  for (int r = 2; r < n; ++r) {
    const std::ptrdiff_t cur = static_cast<std::ptrdiff_t>(r) * B;
    const std::ptrdiff_t p1 = cur - B;
    const std::ptrdiff_t p2 = cur - 2 * B;
    for (int b = 0; b < B; ++b) {
      const double mm1 = e[cur + b] / dpv[p2 + b];
      const double cbar = c[cur + b] - mm1 * ap[p2 + b];
      const double mm2 = cbar / dpv[p1 + b];
      m1[cur + b] = mm1;
      m2[cur + b] = mm2;
      dpv[cur + b] = d[cur + b] - mm1 * bp[p2 + b] - mm2 * ap[p1 + b];
      ap[cur + b] = a[cur + b] - mm2 * bp[p1 + b];
    }
    pivot_check(r);
  }
  for (Eigen::Index k = 0; k < len; ++k) dInv[k] = 1.0 / dpv[k];
}

void PentaFactor::solve_range(RhsBatch& rhs, int b0, int b1) const {
  const int B = batchCount_;
  const int n = n_;
  double* y = rhs.values.data();
  const double* m1 = m1_.data();
  const double* m2 = m2_.data();
  const double* dInv = dInv_.data();
  const double* ap = ap_.data();
  const double* bp = bp_.data();

  // forward substitution
  {
    const std::ptrdiff_t r1 = B;
    for (int b = b0; b < b1; ++b) y[r1 + b] -= m2[r1 + b] * y[b];
  }
  for (int r = 2; r < n; ++r) {
    const std::ptrdiff_t cur = static_cast<std::ptrdiff_t>(r) * B;
    const std::ptrdiff_t p1 = cur - B;
    const std::ptrdiff_t p2 = cur - 2 * B;
    for (int b = b0; b < b1; ++b)
      y[cur + b] -= m1[cur + b] * y[p2 + b] + m2[cur + b] * y[p1 + b];
  }
  // back substitution
  {
    const std::ptrdiff_t last = static_cast<std::ptrdiff_t>(n - 1) * B;
    const std::ptrdiff_t prev = last - B;
    for (int b = b0; b < b1; ++b) y[last + b] *= dInv[last + b];
    for (int b = b0; b < b1; ++b)
      y[prev + b] = (y[prev + b] - ap[prev + b] * y[last + b]) * dInv[prev + b];
  }
  for (int r = n - 3; r >= 0; --r) {
    const std::ptrdiff_t cur = static_cast<std::ptrdiff_t>(r) * B;
    const std::ptrdiff_t s1 = cur + B;
    const std::ptrdiff_t s2 = cur + 2 * B;
    for (int b = b0; b < b1; ++b)
      y[cur + b] = (y[cur + b] - ap[cur + b] * y[s1 + b] - bp[cur + b] * y[s2 + b]) * dInv[cur + b];
  }
}

void PentaFactor::solve_in_place(RhsBatch& rhs, WorkerPool* pool) const {
  check_rhs(rhs, batchCount_, n_, "PentaFactor::solve_in_place");
  for_batch_chunks(batchCount_, pool, [&](int b0, int b1) { solve_range(rhs, b0, b1); });
}

PeriodicPentaFactor::PeriodicPentaFactor(const PentaBatch& m) : core_(m) {
  const int B = m.batchCount;
  const int n = m.n;

  corners_.setZero(static_cast<Eigen::Index>(B) * 6);
  double* cw = corners_.data();
  for (int b = 0; b < B; ++b) {
    cw[b * 6 + 0] = m.secondSub[m.idx(b, 0)];        // row 0,   col n-2
    cw[b * 6 + 1] = m.sub[m.idx(b, 0)];              // row 0,   col n-1
    cw[b * 6 + 2] = m.secondSub[m.idx(b, 1)];        // row 1,   col n-1
    cw[b * 6 + 3] = m.secondSuper[m.idx(b, n - 2)];  // row n-2, col 0
    cw[b * 6 + 4] = m.super[m.idx(b, n - 1)];        // row n-1, col 0
    cw[b * 6 + 5] = m.secondSuper[m.idx(b, n - 1)];  // row n-1, col 1
  }

  // W = P^{-1} U, one core solve per unit column.
  const int rowOf[4] = {0, 1, n - 2, n - 1};
  RhsBatch col(B, n);
  for (int cidx = 0; cidx < 4; ++cidx) {
    col.values.setZero();
    for (int b = 0; b < B; ++b) col.at(b, rowOf[cidx]) = 1.0;
    core_.solve_in_place(col);
    w_[cidx] = col.values;
  }

  // Capacitance K = I4 + V^T W per system.
  capLu_.setZero(static_cast<Eigen::Index>(B) * 16);
  capPiv_.setZero(static_cast<Eigen::Index>(B) * 4);
  for (int b = 0; b < B; ++b) {
    double K[16];
    for (int cidx = 0; cidx < 4; ++cidx) {
      const double* W = w_[cidx].data();
      const double w0 = W[col.idx(b, 0)];
      const double w1 = W[col.idx(b, 1)];
      const double wn2 = W[col.idx(b, n - 2)];
      const double wn1 = W[col.idx(b, n - 1)];
      K[0 * 4 + cidx] = cw[b * 6 + 0] * wn2 + cw[b * 6 + 1] * wn1;
      K[1 * 4 + cidx] = cw[b * 6 + 2] * wn1;
      K[2 * 4 + cidx] = cw[b * 6 + 3] * w0;
      K[3 * 4 + cidx] = cw[b * 6 + 4] * w0 + cw[b * 6 + 5] * w1;
    }
    for (int r = 0; r < 4; ++r) K[r * 4 + r] += 1.0;
    int piv[4];
    lu4_factor(K, piv, b);
    std::copy(K, K + 16, capLu_.data() + static_cast<std::ptrdiff_t>(b) * 16);
    std::copy(piv, piv + 4, capPiv_.data() + static_cast<std::ptrdiff_t>(b) * 4);
  }
}

void PeriodicPentaFactor::correct_range(RhsBatch& rhs, int b0, int b1) const {
  const int B = core_.batch_count();
  const int n = core_.size();
  double* z = rhs.values.data();
  const double* cw = corners_.data();

  // y = K^{-1} V^T z per system, then z -= W y.
  thread_local std::vector<double> ys;
  ys.resize(static_cast<std::size_t>(b1 - b0) * 4);
  for (int b = b0; b < b1; ++b) {
    const double z0 = z[rhs.idx(b, 0)];
    const double z1 = z[rhs.idx(b, 1)];
    const double zn2 = z[rhs.idx(b, n - 2)];
    const double zn1 = z[rhs.idx(b, n - 1)];
    double* y = ys.data() + static_cast<std::ptrdiff_t>(b - b0) * 4;
    y[0] = cw[b * 6 + 0] * zn2 + cw[b * 6 + 1] * zn1;
    y[1] = cw[b * 6 + 2] * zn1;
    y[2] = cw[b * 6 + 3] * z0;
    y[3] = cw[b * 6 + 4] * z0 + cw[b * 6 + 5] * z1;
    lu4_solve(capLu_.data() + static_cast<std::ptrdiff_t>(b) * 16,
              capPiv_.data() + static_cast<std::ptrdiff_t>(b) * 4, y);
  }
  const double* W0 = w_[0].data();
  const double* W1 = w_[1].data();
  const double* W2 = w_[2].data();
  const double* W3 = w_[3].data();
  for (int r = 0; r < n; ++r) {
    const std::ptrdiff_t cur = static_cast<std::ptrdiff_t>(r) * B;
    for (int b = b0; b < b1; ++b) {
      const double* y = ys.data() + static_cast<std::ptrdiff_t>(b - b0) * 4;
      z[cur + b] -=
          W0[cur + b] * y[0] + W1[cur + b] * y[1] + W2[cur + b] * y[2] + W3[cur + b] * y[3];
    }
  }
}

void PeriodicPentaFactor::solve_in_place(RhsBatch& rhs, WorkerPool* pool) const {
  check_rhs(rhs, core_.batch_count(), core_.size(), "PeriodicPentaFactor::solve_in_place");
  for_batch_chunks(core_.batch_count(), pool, [&](int b0, int b1) {
    core_.solve_range(rhs, b0, b1);
    correct_range(rhs, b0, b1);
  });
}

RhsBatch solve_batch(const PentaBatch& m, RhsBatch rhs, WorkerPool* pool) {
  if (m.periodic) throw std::invalid_argument("solve_batch: operator is periodic");
  check_rhs(rhs, m.batchCount, m.n, "solve_batch");
  const PentaFactor factor(m);
  factor.solve_in_place(rhs, pool);
  return rhs;
}

RhsBatch solve_periodic_batch(const PentaBatch& m, RhsBatch rhs, WorkerPool* pool) {
  if (!m.periodic) throw std::invalid_argument("solve_periodic_batch: operator is not periodic");
  check_rhs(rhs, m.batchCount, m.n, "solve_periodic_batch");
  const PeriodicPentaFactor factor(m);
  factor.solve_in_place(rhs, pool);
  return rhs;
}

PentaBatch build_hyperdiffusion_operator(double sigma, int n, int batchCount, bool periodic) {
  if (!(sigma >= 0.0)) throw std::invalid_argument("build_hyperdiffusion_operator: sigma must be >= 0");
  PentaBatch m(batchCount, n, periodic);
  const double second = sigma;
  const double first = -4.0 * sigma;
  const double center = 1.0 + 6.0 * sigma;
  m.secondSub.setConstant(second);
  m.sub.setConstant(first);
  m.diag.setConstant(center);
  m.super.setConstant(first);
  m.secondSuper.setConstant(second);
  if (!periodic) {
    for (int b = 0; b < batchCount; ++b) {
      m.secondSub[m.idx(b, 0)] = 0.0;
      m.secondSub[m.idx(b, 1)] = 0.0;
      m.sub[m.idx(b, 0)] = 0.0;
      m.super[m.idx(b, n - 1)] = 0.0;
      m.secondSuper[m.idx(b, n - 2)] = 0.0;
      m.secondSuper[m.idx(b, n - 1)] = 0.0;
    }
  }
  return m;
}

RhsBatch interleave(const Grid2D& g, Axis axis) {
  RhsBatch out(axis == Axis::X ? g.ny : g.nx, axis == Axis::X ? g.nx : g.ny);
  interleave_into(g, axis, out);
  return out;
}

void interleave_into(const Grid2D& g, Axis axis, RhsBatch& out) {
  const int batchCount = axis == Axis::X ? g.ny : g.nx;
  const int n = axis == Axis::X ? g.nx : g.ny;
  if (out.batchCount != batchCount || out.n != n)
    throw std::invalid_argument("interleave_into: batch shape does not match the grid");
  const double* v = g.data();
  double* o = out.values.data();
  if (axis == Axis::X) {
    // out(b = j, r = i) = g(i, j): a transposed copy of the row-major field.
    for (int j = 0; j < g.ny; ++j) {
      const double* row = v + static_cast<std::ptrdiff_t>(j) * g.nx;
      for (int i = 0; i < g.nx; ++i) o[static_cast<std::ptrdiff_t>(i) * g.ny + j] = row[i];
    }
  } else {
    // out(b = i, r = j) = g(i, j): the field layout is already interleaved.
    std::copy(v, v + g.size(), o);
  }
}

Grid2D deinterleave(const RhsBatch& rhs, Axis axis, double dx, double dy) {
  Grid2D g(axis == Axis::X ? rhs.n : rhs.batchCount, axis == Axis::X ? rhs.batchCount : rhs.n, dx,
           dy);
  deinterleave_into(rhs, axis, g);
  return g;
}

void deinterleave_into(const RhsBatch& rhs, Axis axis, Grid2D& out) {
  const int nx = axis == Axis::X ? rhs.n : rhs.batchCount;
  const int ny = axis == Axis::X ? rhs.batchCount : rhs.n;
  if (out.nx != nx || out.ny != ny)
    throw std::invalid_argument("deinterleave_into: grid shape does not match the batch");
  const double* v = rhs.values.data();
  double* o = out.data();
  if (axis == Axis::X) {
    for (int j = 0; j < ny; ++j) {
      double* row = o + static_cast<std::ptrdiff_t>(j) * nx;
      for (int i = 0; i < nx; ++i) row[i] = v[static_cast<std::ptrdiff_t>(i) * ny + j];
    }
  } else {
    std::copy(v, v + out.size(), o);
  }
}

}  // namespace stengrid
