#include "stengrid/stencil.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace stengrid {

namespace {

const Extents& kind_extents(const StencilKind& kind) {
  return std::visit([](const auto& s) -> const Extents& { return s.ext; }, kind);
}

/// Geometry shared by all kernels: computed row/column ranges and the column
/// band where windows need no horizontal wrap.
struct KernelGeom {
  int nx, ny;
  int W, H;
  int left, top;
  int rowLo, rowHi;
  int fastLo, fastHi;
  bool periodic;
};

KernelGeom make_geom(const Grid2D& g, const Extents& e, BoundaryMode mode) {
  KernelGeom k;
  k.nx = g.nx;
  k.ny = g.ny;
  k.W = e.width();
  k.H = e.height();
  k.left = e.left;
  k.top = e.top;
  k.periodic = (mode == BoundaryMode::Periodic);
  k.rowLo = k.periodic ? 0 : e.top;
  k.rowHi = k.periodic ? g.ny : g.ny - e.bottom;
  k.fastLo = std::min(e.left, g.nx);
  k.fastHi = std::max(std::min(g.nx - e.right, g.nx), k.fastLo);
  return k;
}

void fill_row_bases(const KernelGeom& k, int j, std::ptrdiff_t* rowBase) {
  for (int q = 0; q < k.H; ++q) {
    const int jj = j - k.top + q;
    rowBase[q] = static_cast<std::ptrdiff_t>(k.periodic ? wrap(jj, k.ny) : jj) * k.nx;
  }
}

double weights_wrapped_point(const double* v, const double* w, const KernelGeom& k,
                             const std::ptrdiff_t* rowBase, int i) {
  double acc = 0.0;
  const double* wp = w;
  for (int q = 0; q < k.H; ++q) {
    const std::ptrdiff_t base = rowBase[q];
    for (int p = 0; p < k.W; ++p) acc += wp[p] * v[base + wrap(i - k.left + p, k.nx)];
    wp += k.W;
  }
  return acc;
}

void weights_rows(const Grid2D& in, Grid2D& out, const double* w, const KernelGeom& k, int jBegin,
                  int jEnd, std::ptrdiff_t* rowBase) {
  const double* v = in.data();
  double* o = out.data();
  for (int j = jBegin; j < jEnd; ++j) {
    fill_row_bases(k, j, rowBase);
    double* orow = o + static_cast<std::ptrdiff_t>(j) * k.nx;
    if (k.periodic) {
      for (int i = 0; i < k.fastLo; ++i) orow[i] = weights_wrapped_point(v, w, k, rowBase, i);
    }
    for (int i = k.fastLo; i < k.fastHi; ++i) {
      double acc = 0.0;
      const double* wp = w;
      for (int q = 0; q < k.H; ++q) {
        const double* vin = v + rowBase[q] + (i - k.left);
        for (int p = 0; p < k.W; ++p) acc += wp[p] * vin[p];
        wp += k.W;
      }
      orow[i] = acc;
    }
    if (k.periodic) {
      for (int i = k.fastHi; i < k.nx; ++i) orow[i] = weights_wrapped_point(v, w, k, rowBase, i);
    }
  }
}

double function_gathered_point(const double* v, const FunctionStencil& fs, const KernelGeom& k,
                               const std::ptrdiff_t* rowBase, int i, double* scratch) {
  for (int q = 0; q < k.H; ++q) {
    const std::ptrdiff_t base = rowBase[q];
    for (int p = 0; p < k.W; ++p) scratch[q * k.W + p] = v[base + wrap(i - k.left + p, k.nx)];
  }
  return fs.fn(scratch, fs.coe.data(), k.W);
}

void function_rows(const Grid2D& in, Grid2D& out, const FunctionStencil& fs, const KernelGeom& k,
                   int jBegin, int jEnd, std::ptrdiff_t* rowBase, double* scratch) {
  const double* v = in.data();
  double* o = out.data();
  const double* coe = fs.coe.data();
  for (int j = jBegin; j < jEnd; ++j) {
    fill_row_bases(k, j, rowBase);
    double* orow = o + static_cast<std::ptrdiff_t>(j) * k.nx;
    const bool vertInterior = (j - k.top >= 0) && (j - k.top + k.H <= k.ny);
    if (k.periodic) {
      for (int i = 0; i < k.fastLo; ++i)
        orow[i] = function_gathered_point(v, fs, k, rowBase, i, scratch);
    }
    if (vertInterior) {
      const double* vbase = v + rowBase[0] - k.left;
      for (int i = k.fastLo; i < k.fastHi; ++i) orow[i] = fs.fn(vbase + i, coe, k.nx);
    } else {
      for (int i = k.fastLo; i < k.fastHi; ++i) {
        for (int q = 0; q < k.H; ++q) {
          const double* vin = v + rowBase[q] + (i - k.left);
          for (int p = 0; p < k.W; ++p) scratch[q * k.W + p] = vin[p];
        }
        orow[i] = fs.fn(scratch, coe, k.W);
      }
    }
    if (k.periodic) {
      for (int i = k.fastHi; i < k.nx; ++i)
        orow[i] = function_gathered_point(v, fs, k, rowBase, i, scratch);
    }
  }
}

void validate_kind(Direction dir, const StencilKind& kind, const Grid2D& g) {
  const Extents& ext = kind_extents(kind);
  if (!ext.valid()) throw std::invalid_argument("create_plan: negative stencil extents");
  if (dir == Direction::X && (ext.top != 0 || ext.bottom != 0))
    throw std::invalid_argument("create_plan: X-direction stencil requires top = bottom = 0");
  if (dir == Direction::Y && (ext.left != 0 || ext.right != 0))
    throw std::invalid_argument("create_plan: Y-direction stencil requires left = right = 0");
  if (ext.left >= g.nx || ext.right >= g.nx || ext.top >= g.ny || ext.bottom >= g.ny)
    throw std::invalid_argument("create_plan: stencil extents must be smaller than the grid");
  if (const auto* ws = std::get_if<WeightStencil>(&kind)) {
    if (ws->weights.empty()) throw std::invalid_argument("create_plan: empty weight array");
    const auto want = static_cast<std::size_t>(ext.width()) * static_cast<std::size_t>(ext.height());
    if (ws->weights.size() != want)
      throw std::invalid_argument("create_plan: weight count does not match the stencil window");
    for (double w : ws->weights)
      if (!std::isfinite(w)) throw std::invalid_argument("create_plan: non-finite stencil weight");
  } else {
    const auto& fs = std::get<FunctionStencil>(kind);
    if (fs.fn == nullptr) throw std::invalid_argument("create_plan: null stencil function");
  }
}

}  // namespace

StencilPlan create_plan(Direction direction, BoundaryMode mode, StencilKind kind, Grid2D& input,
                        Grid2D& output, int numTiles, int numWorkers, WorkerPool* sharedPool) {
  if (!input.same_shape(output))
    throw std::invalid_argument("create_plan: input and output shapes differ");
  if (&input == &output || input.data() == output.data())
    throw std::invalid_argument("create_plan: input and output must be distinct buffers");
  validate_kind(direction, kind, input);
  if (numWorkers < 1) throw std::invalid_argument("create_plan: numWorkers must be >= 1");
  if (sharedPool != nullptr && sharedPool->workers() != numWorkers)
    throw std::invalid_argument("create_plan: shared pool size does not match numWorkers");

  const Extents& ext = kind_extents(kind);
  StencilPlan plan;
  plan.direction_ = direction;
  plan.mode_ = mode;
  plan.ext_ = ext;
  plan.kind_ = std::move(kind);
  plan.tiles_ = make_tiles(input.ny, numTiles, ext);
  plan.input_ = &input;
  plan.output_ = &output;
  plan.numWorkers_ = numWorkers;
  if (sharedPool != nullptr) {
    plan.pool_ = sharedPool;
  } else {
    plan.ownedPool_ = std::make_unique<WorkerPool>(numWorkers);
    plan.pool_ = plan.ownedPool_.get();
  }
  if (std::holds_alternative<FunctionStencil>(plan.kind_)) {
    plan.scratch_.assign(static_cast<std::size_t>(numWorkers),
                         std::vector<double>(static_cast<std::size_t>(ext.width()) * ext.height()));
  }
  return plan;
}

void StencilPlan::destroy() {
  input_ = nullptr;
  output_ = nullptr;
  pool_ = nullptr;
  ownedPool_.reset();
  scratch_.clear();
  tiles_ = TilePlan{};
}

void destroy_plan(StencilPlan& plan) { plan.destroy(); }

void swap_plan(StencilPlan& plan) {
  if (!plan.valid()) throw std::logic_error("swap_plan: plan was destroyed");
  std::swap(plan.input_, plan.output_);
}

void compute(StencilPlan& plan, Residency /*hint*/) {
  if (!plan.valid()) throw std::logic_error("compute: plan was destroyed");
  const Grid2D& in = *plan.input_;
  Grid2D& out = *plan.output_;
  if (!in.same_shape(out)) throw std::invalid_argument("compute: bound grids changed shape");
  if (in.data() == out.data()) throw std::invalid_argument("compute: bound grids alias");

  const KernelGeom k = make_geom(in, plan.ext_, plan.mode_);
  const int numTiles = plan.tiles_.num_tiles();
  thread_local std::vector<std::ptrdiff_t> rowBase;

  if (const auto* ws = std::get_if<WeightStencil>(&plan.kind_)) {
    const double* w = ws->weights.data();
    plan.pool_->run(numTiles, [&](int t, int /*worker*/) {
      const TileRange& tile = plan.tiles_.tiles[static_cast<std::size_t>(t)];
      const int b = std::max(tile.jBegin, k.rowLo);
      const int e = std::min(tile.jEnd, k.rowHi);
      if (b >= e) return;
      if (rowBase.size() < static_cast<std::size_t>(k.H)) rowBase.resize(k.H);
      weights_rows(in, out, w, k, b, e, rowBase.data());
    });
  } else {
    const auto& fs = std::get<FunctionStencil>(plan.kind_);
    plan.pool_->run(numTiles, [&](int t, int worker) {
      const TileRange& tile = plan.tiles_.tiles[static_cast<std::size_t>(t)];
      const int b = std::max(tile.jBegin, k.rowLo);
      const int e = std::min(tile.jEnd, k.rowHi);
      if (b >= e) return;
      if (rowBase.size() < static_cast<std::size_t>(k.H)) rowBase.resize(k.H);
      function_rows(in, out, fs, k, b, e, rowBase.data(),
                    plan.scratch_[static_cast<std::size_t>(worker)].data());
    });
  }
}

double apply_weights_at(const Grid2D& input, const WeightStencil& sten, int i, int j,
                        BoundaryMode mode) {
  const Extents& e = sten.ext;
  const int W = e.width();
  const int H = e.height();
  assert(sten.weights.size() == static_cast<std::size_t>(W) * static_cast<std::size_t>(H));
  const double* w = sten.weights.data();
  const double* v = input.data();
  double acc = 0.0;
  if (mode == BoundaryMode::Periodic) {
    for (int q = 0; q < H; ++q) {
      const std::ptrdiff_t base =
          static_cast<std::ptrdiff_t>(wrap(j - e.top + q, input.ny)) * input.nx;
      for (int p = 0; p < W; ++p) acc += w[q * W + p] * v[base + wrap(i - e.left + p, input.nx)];
    }
  } else {
    assert(i - e.left >= 0 && i + e.right < input.nx && j - e.top >= 0 && j + e.bottom < input.ny);
    for (int q = 0; q < H; ++q) {
      const std::ptrdiff_t base = static_cast<std::ptrdiff_t>(j - e.top + q) * input.nx;
      for (int p = 0; p < W; ++p) acc += w[q * W + p] * v[base + (i - e.left + p)];
    }
  }
  return acc;
}

double apply_function_at(const Grid2D& input, const FunctionStencil& sten, int i, int j,
                         BoundaryMode mode) {
  const Extents& e = sten.ext;
  const int W = e.width();
  const int H = e.height();
  assert(sten.fn != nullptr);
  const double* v = input.data();
  std::vector<double> window(static_cast<std::size_t>(W) * static_cast<std::size_t>(H));
  if (mode == BoundaryMode::Periodic) {
    for (int q = 0; q < H; ++q) {
      const std::ptrdiff_t base =
          static_cast<std::ptrdiff_t>(wrap(j - e.top + q, input.ny)) * input.nx;
      for (int p = 0; p < W; ++p)
        window[static_cast<std::size_t>(q) * W + p] = v[base + wrap(i - e.left + p, input.nx)];
    }
  } else {
    assert(i - e.left >= 0 && i + e.right < input.nx && j - e.top >= 0 && j + e.bottom < input.ny);
    for (int q = 0; q < H; ++q) {
      const std::ptrdiff_t base = static_cast<std::ptrdiff_t>(j - e.top + q) * input.nx;
      for (int p = 0; p < W; ++p)
        window[static_cast<std::size_t>(q) * W + p] = v[base + (i - e.left + p)];
    }
  }
  return sten.fn(window.data(), sten.coe.data(), W);
}

}  // namespace stengrid
