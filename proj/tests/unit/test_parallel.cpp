#include <doctest.h>

#include <atomic>
#include <numeric>
#include <stdexcept>

#include "slm/parallel.hpp"

using namespace slm;

TEST_CASE("parallel_for covers every index exactly once") {
  for (std::size_t workers : {1u, 2u, 5u}) {
    WorkerPool pool(workers);
    CHECK(pool.size() == workers);
    for (std::size_t n : {0u, 1u, 3u, 17u, 1000u}) {
      std::vector<int> hits(n, 0);
      pool.parallel_for(n, [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) ++hits[i];
      });
      CHECK(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
    }
  }
}

TEST_CASE("chunk boundaries depend only on n and pool size") {
  WorkerPool pool(4);
  std::vector<std::size_t> end_of(10, 0);
  std::atomic<int> calls{0};
  pool.parallel_for(10, [&](std::size_t b, std::size_t e) {
    end_of[b] = e;
    ++calls;
  });
  CHECK(calls == 4);
  CHECK(end_of[0] == 2);
  CHECK(end_of[2] == 5);
  CHECK(end_of[5] == 7);
  CHECK(end_of[7] == 10);
}

TEST_CASE("nested parallel_for runs inline") {
  WorkerPool pool(3);
  std::vector<long> sums(30, 0);
  pool.parallel_for(30, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i)
      pool.parallel_for(i + 1, [&](std::size_t ib, std::size_t ie) {
        for (std::size_t j = ib; j < ie; ++j) sums[i] += static_cast<long>(j);
      });
  });
  for (std::size_t i = 0; i < 30; ++i) CHECK(sums[i] == static_cast<long>(i * (i + 1) / 2));
}

TEST_CASE("the lowest failing chunk's exception is rethrown") {
  WorkerPool pool(4);
  auto run = [&] {
    pool.parallel_for(8, [](std::size_t b, std::size_t) {
      if (b >= 2) throw std::runtime_error("chunk " + std::to_string(b));
    });
  };
  CHECK_THROWS_WITH(run(), "chunk 2");
  // The pool is still usable afterwards.
  std::atomic<int> n{0};
  pool.parallel_for(8, [&](std::size_t b, std::size_t e) { n += static_cast<int>(e - b); });
  CHECK(n == 8);
}

TEST_CASE("worker counts") {
  CHECK(physical_core_count() >= 1);
  CHECK(WorkerPool(0).size() == 1);
  set_default_workers(2);
  CHECK(default_pool().size() == 2);
  set_default_workers(1);
  CHECK(default_pool().size() == 1);
}
