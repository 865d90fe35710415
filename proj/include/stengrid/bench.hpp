#pragma once

#include "stengrid/cahn_hilliard.hpp"

#include <cstdint>
#include <vector>

namespace stengrid {

/// Serial-vs-parallel Cahn-Hilliard stepping benchmark. For each N the state
/// is built untimed, the stepping loop to T is timed with no IO or
/// diagnostics inside, and teardown is untimed.
struct BenchConfig {
  std::vector<int> sizes = {64, 128, 256};
  int workers = 4;
  int tiles = 0;  // 0: one tile per worker
  double T = 10.0;
  double dtFactor = 0.1;  // dt = dtFactor * (2 pi / N)
  double D = 1.0;
  double gamma = 0.01;
  std::uint64_t seed = 1;
  double icAmplitude = 0.1;
};

struct BenchRow {
  int n = 0;
  long steps = 0;
  double tSerial = 0.0;
  double tParallel = 0.0;
  double speedup = 0.0;
  std::uint64_t checksumSerial = 0;
  std::uint64_t checksumParallel = 0;
  bool bitwiseEqual = false;
  std::int64_t timedAllocs = 0;  // field allocations observed inside the timed loops
};

struct BenchReport {
  std::vector<BenchRow> rows;
  double serialExponent = 0.0;  // least-squares slope of log t_serial vs log N
};

/// FNV-1a over the raw bytes of the field values.
std::uint64_t fnv1a_checksum(const Grid2D& g);

/// Least-squares slope of log(y) against log(x).
double fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

BenchReport run_bench(const BenchConfig& config);

}  // namespace stengrid
