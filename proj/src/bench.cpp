#include "stengrid/bench.hpp"

#include "stengrid/fft.hpp"

#include <chrono>
#include <cmath>
#include <cstring>
#include <stdexcept>

namespace stengrid {

namespace {

CHParams bench_params(const BenchConfig& cfg, int n) {
  CHParams p;
  p.nx = n;
  p.ny = n;
  p.D = cfg.D;
  p.gamma = cfg.gamma;
  p.seed = cfg.seed;
  p.icAmplitude = cfg.icAmplitude;
  p.T = cfg.T;
  p.dt = cfg.dtFactor * (2.0 * std::numbers::pi / n);
  return p;
}

long step_count(const CHParams& p) {
  return static_cast<long>(std::ceil(p.T / p.dt - 1e-9));
}

/// Timed stepping loop; returns seconds and reports field allocations seen
/// inside the loop (expected zero: everything is preallocated by the stepper).
double timed_steps(CHStepper& stepper, long steps, std::int64_t& allocs) {
  const std::int64_t before = detail::large_alloc_count();
  const auto t0 = std::chrono::steady_clock::now();
  for (long s = 0; s < steps; ++s) stepper.step();
  const auto t1 = std::chrono::steady_clock::now();
  allocs = detail::large_alloc_count() - before;
  return std::chrono::duration<double>(t1 - t0).count();
}

}  // namespace

std::uint64_t fnv1a_checksum(const Grid2D& g) {
  const auto* bytes = reinterpret_cast<const unsigned char*>(g.data());
  const std::size_t count = static_cast<std::size_t>(g.size()) * sizeof(double);
  std::uint64_t h = 1469598103934665603ULL;
  for (std::size_t i = 0; i < count; ++i) {
    h ^= bytes[i];
    h *= 1099511628211ULL;
  }
  return h;
}

double fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("fit_loglog_slope: need at least two samples");
  const auto n = static_cast<double>(x.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

BenchReport run_bench(const BenchConfig& cfg) {
  if (cfg.sizes.empty()) throw std::invalid_argument("run_bench: empty size list");
  for (int n : cfg.sizes)
    if (!is_power_of_two(n) || n < 32)
      throw std::invalid_argument("run_bench: sizes must be powers of two >= 32");
  if (cfg.workers < 1) throw std::invalid_argument("run_bench: workers must be >= 1");

  BenchReport report;
  for (int n : cfg.sizes) {
    const CHParams p = bench_params(cfg, n);
    BenchRow row;
    row.n = n;
    row.steps = step_count(p);

    std::int64_t allocsSerial = 0;
    std::int64_t allocsParallel = 0;
    std::uint64_t checksumSerial;
    std::uint64_t checksumParallel;
    Grid2D finalSerial;
    {
      CHStepper serial(p, 1, 1);
      row.tSerial = timed_steps(serial, row.steps, allocsSerial);
      checksumSerial = fnv1a_checksum(serial.field());
      finalSerial = serial.field();
    }
    {
      const int tiles = cfg.tiles > 0 ? cfg.tiles : cfg.workers;
      CHStepper parallel(p, tiles, cfg.workers);
      row.tParallel = timed_steps(parallel, row.steps, allocsParallel);
      checksumParallel = fnv1a_checksum(parallel.field());
      row.bitwiseEqual =
          std::memcmp(finalSerial.data(), parallel.field().data(),
                      static_cast<std::size_t>(finalSerial.size()) * sizeof(double)) == 0;
    }
    row.checksumSerial = checksumSerial;
    row.checksumParallel = checksumParallel;
    row.speedup = row.tSerial / row.tParallel;
    row.timedAllocs = allocsSerial + allocsParallel;
    report.rows.push_back(row);
  }

  std::vector<double> xs, ys;
  for (const BenchRow& r : report.rows) {
    xs.push_back(static_cast<double>(r.n));
    ys.push_back(r.tSerial);
  }
  report.serialExponent = report.rows.size() >= 2 ? fit_loglog_slope(xs, ys) : 0.0;
  return report;
}

}  // namespace stengrid
