// Acceptance suite: runs every criterion at its stated tolerance and prints
// one pass/fail line per criterion. Exit code is the number of hard failures.

#include "stengrid/bench.hpp"
#include "stengrid/cahn_hilliard.hpp"
#include "stengrid/penta.hpp"
#include "stengrid/stencil.hpp"
#include "stengrid/weno.hpp"

#include <Eigen/Dense>

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstring>
#include <numbers>
#include <random>
#include <string>
#include <thread>
#include <vector>

using namespace stengrid;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

int g_hardFailures = 0;

void report(int id, const char* name, bool pass, const std::string& detail, double seconds,
            bool soft = false) {
  const char* tag = pass ? (soft ? "PASS(soft)" : "PASS") : (soft ? "FAIL(soft)" : "FAIL");
  std::printf("[%s] criterion %2d: %s (%s) [%.2f s]\n", tag, id, name, detail.c_str(), seconds);
  std::fflush(stdout);
  if (!pass && !soft) ++g_hardFailures;
}

void report_skip(int id, const char* name, const std::string& why) {
  std::printf("[SKIP] criterion %2d: %s (%s)\n", id, name, why.c_str());
  std::fflush(stdout);
}

class Timer {
 public:
  Timer() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

std::string fmt(const char* f, ...) {
  char buf[256];
  va_list args;
  va_start(args, f);
  std::vsnprintf(buf, sizeof(buf), f, args);
  va_end(args);
  return buf;
}

int worker_budget() {
  const unsigned hw = std::thread::hardware_concurrency();
  return static_cast<int>(std::min(4u, std::max(1u, hw)));
}

// ---------------------------------------------------------------- criterion 1
double sine_second_derivative_error(int n, const std::vector<double>& coeffs, int halfWidth) {
  Grid2D in(n, 1, kTwoPi / n, 1.0);
  for (int i = 0; i < n; ++i) in(i, 0) = std::sin(i * in.dx);
  Grid2D out(n, 1, in.dx, in.dy);
  std::vector<double> w(coeffs.size());
  const double s = 1.0 / (in.dx * in.dx);
  for (std::size_t k = 0; k < w.size(); ++k) w[k] = coeffs[k] * s;
  StencilPlan plan = create_plan(Direction::X, BoundaryMode::Periodic,
                                 WeightStencil{Extents{halfWidth, halfWidth, 0, 0}, w}, in, out,
                                 1, 1);
  compute(plan);
  double maxErr = 0.0;
  for (int i = 0; i < n; ++i) maxErr = std::max(maxErr, std::abs(out(i, 0) + std::sin(i * in.dx)));
  return maxErr;
}

void criterion_1() {
  Timer t;
  const std::vector<double> c2 = {1.0, -2.0, 1.0};
  const std::vector<double> c8 = {-1.0 / 560.0, 8.0 / 315.0,   -1.0 / 5.0,
                                  8.0 / 5.0,    -205.0 / 72.0, 8.0 / 5.0,
                                  -1.0 / 5.0,   8.0 / 315.0,   -1.0 / 560.0};
  const double ratio3 = sine_second_derivative_error(128, c2, 1) /
                        sine_second_derivative_error(256, c2, 1);
  const double ratio9 =
      sine_second_derivative_error(32, c8, 4) / sine_second_derivative_error(64, c8, 4);
  const bool pass = ratio3 >= 3.6 && ratio3 <= 4.4 && ratio9 >= 256.0 * 0.8 &&
                    ratio9 <= 256.0 * 1.2;
  report(1, "stencil convergence orders", pass,
         fmt("3-point ratio %.3f in 4.0+-10%%, 9-point ratio %.1f in 256+-20%%", ratio3, ratio9),
         t.seconds());
}

// ---------------------------------------------------------------- criterion 2
void criterion_2() {
  Timer t;
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> val(-2.0, 2.0);
  int mismatches = 0;
  for (int trial = 0; trial < 200; ++trial) {
    std::uniform_int_distribution<int> dim(1, 9);
    const int nx = dim(rng);
    const int ny = dim(rng);
    auto extent = [&](int n) {
      return std::uniform_int_distribution<int>(0, std::min(2, n - 1))(rng);
    };
    Extents e;
    const int dirPick = std::uniform_int_distribution<int>(0, 2)(rng);
    const Direction dir = dirPick == 0 ? Direction::X : dirPick == 1 ? Direction::Y : Direction::XY;
    if (dir != Direction::Y) {
      e.left = extent(nx);
      e.right = extent(nx);
    }
    if (dir != Direction::X) {
      e.top = extent(ny);
      e.bottom = extent(ny);
    }
    Grid2D in(nx, ny, 1.0, 1.0);
    for (std::ptrdiff_t k = 0; k < in.size(); ++k) in.data()[k] = val(rng);
    const int W = e.left + e.right + 1;
    const int H = e.top + e.bottom + 1;
    std::vector<double> w(static_cast<std::size_t>(W) * H);
    for (double& x : w) x = val(rng);

    Grid2D out(nx, ny, 1.0, 1.0);
    StencilPlan plan = create_plan(dir, BoundaryMode::Periodic, WeightStencil{e, w}, in, out, 1, 1);
    compute(plan);
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) {
        double acc = 0.0;
        for (int q = 0; q < H; ++q)
          for (int p = 0; p < W; ++p) {
            const int ii = (((i - e.left + p) % nx) + nx) % nx;
            const int jj = (((j - e.top + q) % ny) + ny) % ny;
            acc += w[static_cast<std::size_t>(q) * W + p] * in(ii, jj);
          }
        if (std::memcmp(&acc, &out(i, j), sizeof(double)) != 0) ++mismatches;
      }
  }
  report(2, "periodic weight stencils match the brute-force oracle bitwise", mismatches == 0,
         fmt("200 random cases, %d mismatching points", mismatches), t.seconds());
}

// ---------------------------------------------------------------- criterion 3
void criterion_3() {
  Timer t;
  CHParams p;
  p.nx = 128;
  p.ny = 128;
  p.dt = 0.1 * p.dx();
  p.T = 1.0;
  p.seed = 1;

  CHStepper ref(p, 1, 1);
  for (int s = 0; s < 2; ++s) ref.step();

  bool allEqual = true;
  for (int tiles : {1, 2, 4, 8}) {
    for (int workers : {1, 4}) {
      CHStepper st(p, tiles, workers);
      for (int s = 0; s < 2; ++s) st.step();
      allEqual = allEqual &&
                 std::memcmp(st.field().data(), ref.field().data(),
                             sizeof(double) * static_cast<std::size_t>(ref.field().size())) == 0;
    }
  }
  report(3, "CH step bitwise invariant over tiles x workers at 128^2", allEqual,
         "numTiles in {1,2,4,8} x numWorkers in {1,4}", t.seconds());
}

// ---------------------------------------------------------------- criterion 4
Eigen::MatrixXd dense_matrix(const PentaBatch& m, int b) {
  const int n = m.n;
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  auto put = [&](int r, int c, double v) {
    if (m.periodic)
      A(r, ((c % n) + n) % n) += v;
    else if (c >= 0 && c < n)
      A(r, c) += v;
  };
  for (int r = 0; r < n; ++r) {
    if (m.periodic || r >= 2) put(r, r - 2, m.secondSub[m.idx(b, r)]);
    if (m.periodic || r >= 1) put(r, r - 1, m.sub[m.idx(b, r)]);
    put(r, r, m.diag[m.idx(b, r)]);
    if (m.periodic || r <= n - 2) put(r, r + 1, m.super[m.idx(b, r)]);
    if (m.periodic || r <= n - 3) put(r, r + 2, m.secondSuper[m.idx(b, r)]);
  }
  return A;
}

void criterion_4() {
  Timer t;
  std::mt19937_64 rng(4242);
  std::uniform_real_distribution<double> val(-1.0, 1.0);
  std::uniform_real_distribution<double> margin(0.5, 2.0);
  std::uniform_int_distribution<int> nDist(5, 32);
  double worstResidual = 0.0;
  double worstDiff = 0.0;
  for (int caseIdx = 0; caseIdx < 100; ++caseIdx) {
    const int n = nDist(rng);
    const bool periodic = caseIdx % 2 == 0;
    PentaBatch m(1, n, periodic);
    for (int r = 0; r < n; ++r) {
      m.secondSub[m.idx(0, r)] = val(rng);
      m.sub[m.idx(0, r)] = val(rng);
      m.super[m.idx(0, r)] = val(rng);
      m.secondSuper[m.idx(0, r)] = val(rng);
    }
    if (!periodic) {
      m.secondSub[m.idx(0, 0)] = 0.0;
      m.secondSub[m.idx(0, 1)] = 0.0;
      m.sub[m.idx(0, 0)] = 0.0;
      m.super[m.idx(0, n - 1)] = 0.0;
      m.secondSuper[m.idx(0, n - 2)] = 0.0;
      m.secondSuper[m.idx(0, n - 1)] = 0.0;
    }
    for (int r = 0; r < n; ++r)
      m.diag[m.idx(0, r)] = std::abs(m.secondSub[m.idx(0, r)]) + std::abs(m.sub[m.idx(0, r)]) +
                            std::abs(m.super[m.idx(0, r)]) +
                            std::abs(m.secondSuper[m.idx(0, r)]) + margin(rng);
    RhsBatch rhs(1, n);
    for (int r = 0; r < n; ++r) rhs.at(0, r) = val(rng);

    const RhsBatch x = periodic ? solve_periodic_batch(m, rhs) : solve_batch(m, rhs);

    const Eigen::MatrixXd A = dense_matrix(m, 0);
    Eigen::VectorXd xv(n), bv(n);
    for (int r = 0; r < n; ++r) {
      xv(r) = x.at(0, r);
      bv(r) = rhs.at(0, r);
    }
    worstResidual = std::max(worstResidual,
                             (A * xv - bv).cwiseAbs().maxCoeff() / bv.cwiseAbs().maxCoeff());
    const Eigen::VectorXd dense = Eigen::PartialPivLU<Eigen::MatrixXd>(A).solve(bv);
    worstDiff = std::max(worstDiff,
                         (xv - dense).cwiseAbs().maxCoeff() / dense.cwiseAbs().maxCoeff());
  }
  const bool pass = worstResidual <= 1e-10 && worstDiff <= 1e-10;
  report(4, "pentadiagonal residuals vs dense elimination", pass,
         fmt("worst residual %.2e, worst diff vs dense %.2e (<= 1e-10)", worstResidual,
             worstDiff),
         t.seconds());
}

// ----------------------------------------------------------- criteria 5 and 6
void criteria_5_and_6() {
  CHParams p;
  p.nx = 256;
  p.ny = 256;
  p.dt = 0.1 * p.dx();
  p.T = 50.0;
  p.D = 1.0;
  p.gamma = 0.01;
  p.seed = 1;
  p.icAmplitude = 0.1;

  Timer t;
  const int workers = worker_budget();
  CHStepper stepper(p, workers, workers);

  double mean0 = 0.0;
  for (std::ptrdiff_t k = 0; k < stepper.field().size(); ++k) mean0 += stepper.field().data()[k];
  mean0 /= static_cast<double>(stepper.field().size());

  const long steps = static_cast<long>(std::ceil(p.T / p.dt - 1e-9));
  const int cadence = 200;  // ~0.49 time units between samples
  std::vector<double> ts, ss, kinvs;
  for (long s = 1; s <= steps; ++s) {
    stepper.step();
    if (s % cadence == 0) {
      const Diagnostics d = stepper.diagnostics();
      if (d.t >= 5.0 && d.t <= 40.0) {
        ts.push_back(d.t);
        ss.push_back(d.s);
        kinvs.push_back(d.k1Inv);
      }
    }
  }

  const double slopeS = fit_loglog_slope(ts, ss);
  const double slopeK = fit_loglog_slope(ts, kinvs);
  const bool pass5 = std::abs(slopeS - 1.0 / 3.0) <= 0.1 && std::abs(slopeK - 1.0 / 3.0) <= 0.1;
  report(5, "coarsening t^(1/3) law at 256^2, T = 50", pass5,
         fmt("slope[s] = %.3f, slope[1/k1] = %.3f over t in [5,40] (want 1/3 +- 0.1, %zu samples)",
             slopeS, slopeK, ts.size()),
         t.seconds());

  double meanT = 0.0;
  for (std::ptrdiff_t k = 0; k < stepper.field().size(); ++k) meanT += stepper.field().data()[k];
  meanT /= static_cast<double>(stepper.field().size());
  const double drift = std::abs(meanT - mean0);
  report(6, "mass conservation on the criterion-5 run", drift <= 1e-8,
         fmt("|<C>(T) - <C>(0)| = %.2e (<= 1e-8)", drift), 0.0);
}

// ---------------------------------------------------------------- criterion 7
void criterion_7() {
  Timer t;
  CHParams p;
  p.nx = 64;
  p.ny = 64;
  p.dt = 0.1 * p.dx();
  p.T = 1.0;
  p.seed = 31;
  const Grid2D c0 = initial_condition(p);
  CHParams p2 = p;
  p2.seed = 32;
  const Grid2D cm1 = initial_condition(p2);

  CHStepper a(p);
  a.set_state(c0, cm1);
  a.step();

  Grid2D nc0 = c0;
  Grid2D ncm1 = cm1;
  nc0.values = -nc0.values;
  ncm1.values = -ncm1.values;
  CHStepper b(p);
  b.set_state(nc0, ncm1);
  b.step();

  bool exact = true;
  for (std::ptrdiff_t k = 0; k < c0.size(); ++k) {
    const double want = -a.field().data()[k];
    if (std::memcmp(&want, &b.field().data()[k], sizeof(double)) != 0) exact = false;
  }
  report(7, "negation equivariance of one ADI step at 64^2", exact, "bitwise", t.seconds());
}

// ---------------------------------------------------------------- criterion 8
void criterion_8() {
  Timer t;
  Grid2D cx(64, 64, kTwoPi / 64, kTwoPi / 64);
  Grid2D c4y(64, 64, kTwoPi / 64, kTwoPi / 64);
  for (int j = 0; j < 64; ++j)
    for (int i = 0; i < 64; ++i) {
      cx(i, j) = std::cos(i * cx.dx);
      c4y(i, j) = std::cos(4.0 * j * c4y.dy);
    }
  const double k1x = k1_metric(cx);
  const double k1y = k1_metric(c4y);
  const bool pass = std::abs(k1x - 1.0) <= 1e-12 && std::abs(k1y - 4.0) <= 1e-12;
  report(8, "k1 oracles", pass,
         fmt("k1[cos x] = %.15f, k1[cos 4y] = %.15f (within 1e-12)", k1x, k1y), t.seconds());
}

// ---------------------------------------------------------------- criterion 9
double weno_sine_error(int n) {
  Grid2D phi(n, n, kTwoPi / n, kTwoPi / n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) phi(i, j) = std::sin(i * phi.dx);
  VelocityField vel{Grid2D(n, n, phi.dx, phi.dy), Grid2D(n, n, phi.dx, phi.dy)};
  vel.u.values.setConstant(1.0);
  const Grid2D adv = weno_advect(phi, vel);
  double maxErr = 0.0;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      maxErr = std::max(maxErr, std::abs(adv(i, j) + std::cos(i * phi.dx)));
  return maxErr;
}

void criterion_9() {
  Timer t;
  const double e64 = weno_sine_error(64);
  const double e128 = weno_sine_error(128);
  const double order = std::log2(e64 / e128);
  report(9, "WENO5 observed convergence order", order >= 4.5,
         fmt("order %.2f between N = 64 and N = 128 (>= 4.5)", order), t.seconds());
}

// --------------------------------------------------------------- criterion 10
void criterion_10() {
  Timer t;
  BenchConfig cfg;
  cfg.sizes = {64, 128, 256};
  cfg.workers = worker_budget();
  cfg.T = 10.0;
  cfg.dtFactor = 0.1;
  cfg.seed = 1;
  const BenchReport report10 = run_bench(cfg);

  bool bitwise = true;
  bool noAllocs = true;
  for (const BenchRow& r : report10.rows) {
    bitwise = bitwise && r.bitwiseEqual;
    noAllocs = noAllocs && r.timedAllocs == 0;
  }
  const double expn = report10.serialExponent;
  const bool pass = bitwise && noAllocs && expn >= 2.6 && expn <= 3.4;
  std::string detail = fmt("serial exponent %.2f (3.0 +- 0.4), serial/parallel fields %s, "
                           "timed-loop field allocs %s",
                           expn, bitwise ? "bitwise equal" : "MISMATCH",
                           noAllocs ? "0" : "NONZERO");
  report(10, "benchmark scaling and bitwise serial/parallel equality", pass, detail, t.seconds());

  const unsigned hw = std::thread::hardware_concurrency();
  if (hw >= 4) {
    Timer ts512;
    BenchConfig big = cfg;
    big.sizes = {512};
    big.workers = 4;
    const BenchReport r512 = run_bench(big);
    const double speedup = r512.rows[0].speedup;
    report(10, "parallel speedup >= 2 with 4 workers at N = 512", speedup >= 2.0,
           fmt("speedup %.2f", speedup), ts512.seconds(), /*soft=*/true);
  } else {
    report_skip(10, "parallel speedup >= 2 with 4 workers at N = 512",
                fmt("soft, hardware-relative: needs >= 4 cores, found %u", hw));
  }
}

}  // namespace

int main() {
  std::printf("stengrid acceptance suite\n");
  const Timer total;
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criteria_5_and_6();
  criterion_7();
  criterion_8();
  criterion_9();
  criterion_10();
  std::printf("total time %.1f s; hard failures: %d\n", total.seconds(), g_hardFailures);
  return g_hardFailures;
}
