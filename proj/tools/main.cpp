// stengrid command line front end: stencil demos, the Cahn-Hilliard run with
// diagnostics output, and the serial-vs-parallel stepping benchmark.

#include "stengrid/bench.hpp"
#include "stengrid/cahn_hilliard.hpp"
#include "stengrid/snapshot.hpp"
#include "stengrid/stencil.hpp"
#include "stengrid/weno.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace {

using namespace stengrid;

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Grid2D sine_x_field(int nx, int ny, double lx) {
  Grid2D g(nx, ny, lx / nx, kTwoPi / ny);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) g(i, j) = std::sin(i * g.dx);
  return g;
}

/// 8th-order central weights for the second derivative, scaled by 1/dx^2.
std::vector<double> eighth_order_second_derivative(double dx) {
  const std::vector<double> c = {-1.0 / 560.0, 8.0 / 315.0,  -1.0 / 5.0,
                                 8.0 / 5.0,    -205.0 / 72.0, 8.0 / 5.0,
                                 -1.0 / 5.0,   8.0 / 315.0,   -1.0 / 560.0};
  std::vector<double> w(c.size());
  const double s = 1.0 / (dx * dx);
  for (std::size_t k = 0; k < c.size(); ++k) w[k] = c[k] * s;
  return w;
}

double central_difference_window(const double* window, const double* coe, int /*rowStride*/) {
  return (window[0] - 2.0 * window[1] + window[2]) * coe[0];
}

void print_demo_row(int i, double x, bool touched, double got, double want) {
  if (touched)
    std::printf("%6d  %9.6f  %14.10f  %14.10f\n", i, x, got, want);
  else
    std::printf("%6d  %9.6f  %14s  %14.10f\n", i, x, "(untouched)", want);
}

int demo_x(int nx, int ny) {
  Grid2D input = sine_x_field(nx, ny, kTwoPi);
  Grid2D output(nx, ny, input.dx, input.dy);
  WeightStencil sten{Extents{4, 4, 0, 0}, eighth_order_second_derivative(input.dx)};
  StencilPlan plan =
      create_plan(Direction::X, BoundaryMode::NonPeriodic, sten, input, output, 1, 1);
  compute(plan, Residency::Host);
  destroy_plan(plan);

  std::printf("demo-x: 8th-order second derivative of sin(x), non-periodic, %d x %d\n", nx, ny);
  std::printf("%6s  %9s  %14s  %14s\n", "i", "x", "computed", "-sin(x)");
  const int j = ny / 2;
  double maxErr = 0.0;
  for (int i = 4; i < nx - 4; ++i)
    maxErr = std::max(maxErr, std::abs(output(i, j) + std::sin(i * input.dx)));
  for (int i : {0, 3, 4, 5, nx / 2, nx - 6, nx - 5, nx - 4, nx - 1}) {
    const bool touched = (i >= 4 && i < nx - 4);
    print_demo_row(i, i * input.dx, touched, output(i, j), -std::sin(i * input.dx));
  }
  std::printf("4 cells on either side are left for caller boundary conditions\n");
  std::printf("max |error| over computed cells: %.3e\n", maxErr);
  return 0;
}

int demo_x_fun(int nx, int ny) {
  Grid2D input = sine_x_field(nx, ny, kTwoPi);
  Grid2D output(nx, ny, input.dx, input.dy);
  FunctionStencil sten{Extents{1, 1, 0, 0}, &central_difference_window,
                       {1.0 / (input.dx * input.dx)}};
  StencilPlan plan =
      create_plan(Direction::X, BoundaryMode::NonPeriodic, sten, input, output, 1, 1);
  compute(plan, Residency::Host);
  destroy_plan(plan);

  std::printf("demo-x-fun: function-pointer central second derivative of sin(x), %d x %d\n", nx,
              ny);
  std::printf("%6s  %9s  %14s  %14s\n", "i", "x", "computed", "-sin(x)");
  const int j = ny / 2;
  double maxErr = 0.0;
  for (int i = 1; i < nx - 1; ++i)
    maxErr = std::max(maxErr, std::abs(output(i, j) + std::sin(i * input.dx)));
  for (int i : {0, 1, 2, nx / 2, nx - 3, nx - 2, nx - 1}) {
    const bool touched = (i >= 1 && i < nx - 1);
    print_demo_row(i, i * input.dx, touched, output(i, j), -std::sin(i * input.dx));
  }
  std::printf("max |error| over computed cells: %.3e\n", maxErr);
  return 0;
}

int demo_xy(int n) {
  Grid2D input(n, n, kTwoPi / n, kTwoPi / n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) input(i, j) = std::sin(i * input.dx) * std::sin(j * input.dy);
  Grid2D output(n, n, input.dx, input.dy);
  const double s = 1.0 / ((input.dx * input.dx) * (input.dy * input.dy));
  std::vector<double> w = {1.0 * s, -2.0 * s, 1.0 * s, -2.0 * s, 4.0 * s,
                           -2.0 * s, 1.0 * s, -2.0 * s, 1.0 * s};
  WeightStencil sten{Extents{1, 1, 1, 1}, w};
  StencilPlan plan = create_plan(Direction::XY, BoundaryMode::Periodic, sten, input, output, 1, 1);
  compute(plan, Residency::Host);
  destroy_plan(plan);

  double maxErr = 0.0;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      maxErr = std::max(
          maxErr, std::abs(output(i, j) - std::sin(i * input.dx) * std::sin(j * input.dy)));
  std::printf("demo-xy: cross derivative d4/dx2dy2 of sin(x)sin(y), periodic, %d x %d\n", n, n);
  std::printf("expected field is sin(x)sin(y); max |error| = %.3e\n", maxErr);
  return 0;
}

double weno_demo_error(int n) {
  Grid2D phi(n, n, kTwoPi / n, kTwoPi / n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) phi(i, j) = std::sin(i * phi.dx);
  VelocityField vel{Grid2D(n, n, phi.dx, phi.dy), Grid2D(n, n, phi.dx, phi.dy)};
  vel.u.values.setConstant(1.0);
  const Grid2D adv = weno_advect(phi, vel);
  double maxErr = 0.0;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) maxErr = std::max(maxErr, std::abs(adv(i, j) + std::cos(i * phi.dx)));
  return maxErr;
}

int weno_demo() {
  std::printf("weno-demo: WENO5 upwind advection of sin(x) by u = 1, v = 0 (periodic)\n");
  const double e64 = weno_demo_error(64);
  const double e128 = weno_demo_error(128);
  std::printf("N =  64: max |adv + cos(x)| = %.3e\n", e64);
  std::printf("N = 128: max |adv + cos(x)| = %.3e\n", e128);
  std::printf("observed order: %.2f\n", std::log2(e64 / e128));
  return 0;
}

struct ChRunOptions {
  CHParams params;
  double dtFactor = 0.1;
  int workers = 1;
  int tiles = 0;
  int diagEvery = 100;
  int snapEvery = 0;
  std::string diagOut = "ch_diagnostics.csv";
  std::string snapPrefix = "ch_snapshot";
};

int ch_run(ChRunOptions opt) {
  opt.params.dt = opt.dtFactor * opt.params.dx();
  opt.params.validate();
  const int tiles = opt.tiles > 0 ? opt.tiles : std::max(1, opt.workers);

  std::ofstream diag(opt.diagOut, std::ios::binary);
  if (!diag) {
    std::cerr << "ch-run: cannot open " << opt.diagOut << "\n";
    return 1;
  }
  diag << kDiagnosticsCsvHeader << '\n';

  RunSink sink;
  sink.diagEvery = opt.diagEvery;
  sink.snapEvery = opt.snapEvery;
  sink.onDiagnostics = [&](const Diagnostics& d) {
    diag << format_diagnostics_row(d) << '\n';
    diag.flush();
  };
  sink.onSnapshot = [&](const Grid2D& g, int step, double /*t*/) {
    char name[64];
    std::snprintf(name, sizeof(name), "_%08d.csg", step);
    write_snapshot(g, opt.snapPrefix + name);
  };

  std::printf("ch-run: %d x %d, D = %g, gamma = %g, dt = %.6g, T = %g, seed = %llu\n",
              opt.params.nx, opt.params.ny, opt.params.D, opt.params.gamma, opt.params.dt,
              opt.params.T, static_cast<unsigned long long>(opt.params.seed));
  std::fflush(stdout);
  run(opt.params, tiles, opt.workers, sink);
  std::printf("diagnostics written to %s\n", opt.diagOut.c_str());
  return 0;
}

int ch_bench(BenchConfig cfg, const std::string& outPath) {
  const BenchReport report = run_bench(cfg);
  std::printf("ch-bench: stepping to T = %g, dt = %g * (2 pi / N), workers = %d\n", cfg.T,
              cfg.dtFactor, cfg.workers);
  std::printf("N,t_serial,t_parallel,speedup\n");
  for (const BenchRow& r : report.rows)
    std::printf("%d,%.6f,%.6f,%.3f\n", r.n, r.tSerial, r.tParallel, r.speedup);
  for (const BenchRow& r : report.rows)
    std::printf("N = %4d: steps = %ld, checksum serial = %016llx, parallel = %016llx, %s, "
                "timed-loop field allocs = %lld\n",
                r.n, r.steps, static_cast<unsigned long long>(r.checksumSerial),
                static_cast<unsigned long long>(r.checksumParallel),
                r.bitwiseEqual ? "bitwise equal" : "MISMATCH",
                static_cast<long long>(r.timedAllocs));
  std::printf("fitted serial scaling exponent: %.3f\n", report.serialExponent);
  if (!outPath.empty()) {
    std::ofstream out(outPath, std::ios::binary);
    if (!out) {
      std::cerr << "ch-bench: cannot open " << outPath << "\n";
      return 1;
    }
    out << "N,t_serial,t_parallel,speedup\n";
    char buf[128];
    for (const BenchRow& r : report.rows) {
      std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,%.17g\n", r.n, r.tSerial, r.tParallel,
                    r.speedup);
      out << buf;
    }
    std::printf("benchmark CSV written to %s\n", outPath.c_str());
  }
  bool ok = true;
  for (const BenchRow& r : report.rows) ok = ok && r.bitwiseEqual && r.timedAllocs == 0;
  return ok ? 0 : 1;
}

/// Parse a key=value config file ('#' comments, blank lines allowed) into
/// "--key=value" arguments.
std::vector<std::string> read_config_args(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read config file " + path);
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };
  std::vector<std::string> args;
  std::string line;
  int lineNo = 0;
  while (std::getline(in, line)) {
    ++lineNo;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error(path + ":" + std::to_string(lineNo) + ": expected key=value");
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (key.empty())
      throw std::runtime_error(path + ":" + std::to_string(lineNo) + ": empty key");
    args.push_back("--" + key + "=" + value);
  }
  return args;
}

/// Pull `--config FILE` out of the raw arguments and splice the file's
/// options in ahead of the remaining flags, so the command line wins under
/// the take-last policy.
std::vector<std::string> splice_config(const std::vector<std::string>& raw) {
  std::string configPath;
  std::vector<std::string> rest;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const std::string& a = raw[i];
    if (a == "--config") {
      if (i + 1 >= raw.size()) throw std::runtime_error("--config needs a file argument");
      configPath = raw[++i];
    } else if (a.rfind("--config=", 0) == 0) {
      configPath = a.substr(9);
    } else {
      rest.push_back(a);
    }
  }
  if (configPath.empty()) return rest;
  std::vector<std::string> merged = read_config_args(configPath);
  merged.insert(merged.end(), rest.begin(), rest.end());
  return merged;
}

void take_last_all(CLI::App* sub) {
  for (CLI::Option* opt : sub->get_options())
    opt->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"stengrid: tiled 2D finite-difference stencil engine with a Cahn-Hilliard "
               "BDF2-ADI solver, WENO5 advection and a serial-vs-parallel benchmark"};
  app.require_subcommand(1);
  app.footer("Every subcommand also accepts --config FILE with one key=value per line\n"
             "('#' comments); keys are the long option names and flags override the file.");

  int demoNx = 1024;
  int demoNy = 512;
  auto* demoX = app.add_subcommand("demo-x", "8th-order x-derivative of sin(x) via weights");
  demoX->add_option("--nx", demoNx, "points in x")->check(CLI::PositiveNumber);
  demoX->add_option("--ny", demoNy, "points in y")->check(CLI::PositiveNumber);

  auto* demoXFun =
      app.add_subcommand("demo-x-fun", "central x-derivative of sin(x) via a function pointer");
  demoXFun->add_option("--nx", demoNx, "points in x")->check(CLI::PositiveNumber);
  demoXFun->add_option("--ny", demoNy, "points in y")->check(CLI::PositiveNumber);

  int demoXyN = 256;
  auto* demoXy = app.add_subcommand("demo-xy", "cross-derivative stencil on sin(x)sin(y)");
  demoXy->add_option("--n", demoXyN, "points per side")->check(CLI::PositiveNumber);

  auto* wenoDemo = app.add_subcommand("weno-demo", "WENO5 advection demo with convergence check");

  ChRunOptions runOpt;
  runOpt.params.T = 100.0;
  auto* chRun = app.add_subcommand("ch-run", "Cahn-Hilliard simulation with s(t), 1/k1(t) output");
  chRun->add_option("--nx", runOpt.params.nx, "grid points in x (power of two)");
  chRun->add_option("--ny", runOpt.params.ny, "grid points in y (power of two)");
  chRun->add_option("--lx", runOpt.params.lx, "domain length in x");
  chRun->add_option("--ly", runOpt.params.ly, "domain length in y");
  chRun->add_option("--T", runOpt.params.T, "final time");
  chRun->add_option("--dt-factor", runOpt.dtFactor, "dt = dt-factor * dx");
  chRun->add_option("--D", runOpt.params.D, "mobility");
  chRun->add_option("--gamma", runOpt.params.gamma, "gradient energy coefficient");
  chRun->add_option("--seed", runOpt.params.seed, "initial condition seed");
  chRun->add_option("--ic-amplitude", runOpt.params.icAmplitude, "initial condition half-width");
  chRun->add_option("--workers", runOpt.workers, "worker threads")->check(CLI::PositiveNumber);
  chRun->add_option("--tiles", runOpt.tiles, "tiles (0: one per worker)")
      ->check(CLI::NonNegativeNumber);
  chRun->add_option("--diag-every", runOpt.diagEvery, "steps between diagnostics rows")
      ->check(CLI::PositiveNumber);
  chRun->add_option("--snap-every", runOpt.snapEvery, "steps between snapshots (0: none)")
      ->check(CLI::NonNegativeNumber);
  chRun->add_option("--diag-out", runOpt.diagOut, "diagnostics CSV path");
  chRun->add_option("--snap-prefix", runOpt.snapPrefix, "snapshot path prefix");

  BenchConfig benchCfg;
  benchCfg.workers = std::max(2u, std::thread::hardware_concurrency());
  std::string benchOut;
  auto* chBench = app.add_subcommand("ch-bench", "serial vs parallel stepping benchmark");
  chBench->add_option("--N", benchCfg.sizes, "grid sizes (powers of two >= 32)");
  chBench->add_option("--workers", benchCfg.workers, "parallel lane worker count")
      ->check(CLI::PositiveNumber);
  chBench->add_option("--tiles", benchCfg.tiles, "tiles (0: one per worker)")
      ->check(CLI::NonNegativeNumber);
  chBench->add_option("--T", benchCfg.T, "final time");
  chBench->add_option("--dt-factor", benchCfg.dtFactor, "dt = dt-factor * (2 pi / N)");
  chBench->add_option("--seed", benchCfg.seed, "initial condition seed");
  chBench->add_option("--out", benchOut, "also write the CSV to this path");

  for (CLI::App* sub : app.get_subcommands(nullptr)) take_last_all(sub);

  if (argc <= 1) {
    std::cout << app.help();
    return 1;
  }

  // Splice config-file options ahead of the command-line flags so the
  // take-last policy gives the flags precedence.
  std::vector<std::string> args;
  try {
    std::vector<std::string> rest(argv + 2, argv + argc);
    args = splice_config(rest);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  args.insert(args.begin(), argv[1]);
  std::reverse(args.begin(), args.end());  // CLI11 consumes a reversed vector
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (demoX->parsed()) return demo_x(demoNx, demoNy);
    if (demoXFun->parsed()) return demo_x_fun(demoNx, demoNy);
    if (demoXy->parsed()) return demo_xy(demoXyN);
    if (wenoDemo->parsed()) return weno_demo();
    if (chRun->parsed()) return ch_run(runOpt);
    if (chBench->parsed()) return ch_bench(benchCfg, benchOut);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
