#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "stengrid/grid.hpp"
#include "stengrid/worker_pool.hpp"

#include <atomic>
#include <cstring>
#include <random>

using namespace stengrid;

TEST_CASE("linear_index is row-major with i fastest") {
  CHECK(linear_index(0, 0, 8) == 0);
  CHECK(linear_index(3, 2, 8) == 19);
  CHECK(linear_index(7, 511, 1024) == 523271);
}

TEST_CASE("wrap maps signed indices into [0, n)") {
  CHECK(wrap(-1, 8) == 7);
  CHECK(wrap(8, 8) == 0);
  CHECK(wrap(0, 8) == 0);
  CHECK(wrap(-17, 8) == 7);
  CHECK_THROWS_AS(wrap(3, 0), std::invalid_argument);
  CHECK_THROWS_AS(wrap(3, -2), std::invalid_argument);
}

TEST_CASE("wrap is periodic: wrap(i + n, n) == wrap(i, n)") {
  for (int n : {1, 2, 3, 8, 13}) {
    for (int i = -3 * n; i <= 3 * n; ++i) CHECK(wrap(i + n, n) == wrap(i, n));
  }
}

TEST_CASE("transpose swaps shape, spacing and indices") {
  SUBCASE("1x1 grid is a fixed point") {
    Grid2D g(1, 1, 0.5, 0.25);
    g(0, 0) = 42.0;
    const Grid2D t = transpose(g);
    CHECK(t.nx == 1);
    CHECK(t.ny == 1);
    CHECK(t.dx == 0.25);
    CHECK(t.dy == 0.5);
    CHECK(t(0, 0) == 42.0);
  }
  SUBCASE("2x3 layout example") {
    // rows {1,2}, {3,4}, {5,6}: nx = 2, ny = 3
    Grid2D g(2, 3, 1.0, 1.0);
    double k = 1.0;
    for (int j = 0; j < 3; ++j)
      for (int i = 0; i < 2; ++i) g(i, j) = k++;
    const Grid2D t = transpose(g);
    CHECK(t.nx == 3);
    CHECK(t.ny == 2);
    // rows {1,3,5}, {2,4,6}
    const double want[6] = {1, 3, 5, 2, 4, 6};
    for (int k2 = 0; k2 < 6; ++k2) CHECK(t.data()[k2] == want[k2]);
  }
}

TEST_CASE("transpose is a bitwise involution on a random 17x5 grid") {
  Grid2D g(17, 5, 0.1, 0.2);
  std::mt19937_64 rng(123);
  std::uniform_real_distribution<double> dist(-1e3, 1e3);
  for (std::ptrdiff_t k = 0; k < g.size(); ++k) g.data()[k] = dist(rng);
  const Grid2D tt = transpose(transpose(g));
  REQUIRE(tt.size() == g.size());
  CHECK(std::memcmp(tt.data(), g.data(), sizeof(double) * g.size()) == 0);
  CHECK(tt.dx == g.dx);
  CHECK(tt.dy == g.dy);
}

TEST_CASE("make_tiles splits evenly when possible") {
  const TilePlan plan = make_tiles(512, 4, Extents{0, 0, 2, 2});
  REQUIRE(plan.num_tiles() == 4);
  for (int t = 0; t < 4; ++t) {
    CHECK(plan.tiles[t].jBegin == 128 * t);
    CHECK(plan.tiles[t].jEnd == 128 * (t + 1));
  }
  CHECK(plan.haloTop == 2);
  CHECK(plan.haloBottom == 2);
}

TEST_CASE("make_tiles distributes remainder ceiling-first") {
  const TilePlan plan = make_tiles(10, 3, Extents{});
  REQUIRE(plan.num_tiles() == 3);
  CHECK(plan.tiles[0].jEnd - plan.tiles[0].jBegin == 4);
  CHECK(plan.tiles[1].jEnd - plan.tiles[1].jBegin == 3);
  CHECK(plan.tiles[2].jEnd - plan.tiles[2].jBegin == 3);
}

TEST_CASE("make_tiles single tile covers everything") {
  const TilePlan plan = make_tiles(77, 1, Extents{});
  REQUIRE(plan.num_tiles() == 1);
  CHECK(plan.tiles[0].jBegin == 0);
  CHECK(plan.tiles[0].jEnd == 77);
}

TEST_CASE("make_tiles rejects invalid tile counts") {
  CHECK_THROWS_AS(make_tiles(8, 0, Extents{}), std::invalid_argument);
  CHECK_THROWS_AS(make_tiles(8, 9, Extents{}), std::invalid_argument);
  CHECK_THROWS_AS(make_tiles(8, -1, Extents{}), std::invalid_argument);
}

TEST_CASE("tile ranges are disjoint, ordered and cover [0, ny) exhaustively") {
  for (int ny = 1; ny <= 64; ++ny) {
    for (int numTiles = 1; numTiles <= ny; ++numTiles) {
      const TilePlan plan = make_tiles(ny, numTiles, Extents{});
      REQUIRE(plan.num_tiles() == numTiles);
      int expectedBegin = 0;
      for (const TileRange& r : plan.tiles) {
        REQUIRE(r.jBegin == expectedBegin);
        REQUIRE(r.jEnd > r.jBegin);
        expectedBegin = r.jEnd;
      }
      REQUIRE(expectedBegin == ny);
      // sizes differ by at most one, larger first
      const int first = plan.tiles[0].jEnd - plan.tiles[0].jBegin;
      for (const TileRange& r : plan.tiles) {
        const int size = r.jEnd - r.jBegin;
        REQUIRE(size >= first - 1);
        REQUIRE(size <= first);
      }
    }
  }
}

TEST_CASE("Grid2D validates construction") {
  CHECK_THROWS_AS(Grid2D(0, 4, 1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(Grid2D(4, 0, 1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(Grid2D(4, 4, 0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(Grid2D(4, 4, 1.0, -1.0), std::invalid_argument);
}

TEST_CASE("worker pool runs every job exactly once") {
  for (int workers : {1, 2, 4}) {
    WorkerPool pool(workers);
    for (int jobs : {1, 3, 7, 64}) {
      std::vector<std::atomic<int>> hits(jobs);
      for (auto& h : hits) h = 0;
      pool.run(jobs, [&](int job, int worker) {
        CHECK(worker >= 0);
        CHECK(worker < workers);
        hits[job]++;
      });
      for (auto& h : hits) CHECK(h.load() == 1);
    }
  }
}

TEST_CASE("worker pool survives many batches") {
  WorkerPool pool(3);
  std::atomic<long> total{0};
  for (int round = 0; round < 200; ++round) {
    pool.run(5, [&](int job, int) { total += job; });
  }
  CHECK(total.load() == 200L * (0 + 1 + 2 + 3 + 4));
}
