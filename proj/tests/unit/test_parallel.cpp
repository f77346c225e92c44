#include "rectikernel/parallel.hpp"

#include <doctest.h>

#include <bit>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <vector>

using namespace rectikernel;

TEST_CASE("compensated sum recovers cancelled mass") {
  const std::vector<double> v{1e16, 1.0, -1e16, 1.0};
  CHECK(compensated_sum(v) == 2.0);
}

TEST_CASE("block sums are bit-identical across worker counts") {
  const auto block = [](std::size_t b) { return std::sin(static_cast<double>(b)) * 1e-3 + 1.0 / (b + 1.0); };
  std::vector<std::uint64_t> bits;
  for (int w : {1, 2, 3, 8}) {
    set_worker_count(w);
    bits.push_back(std::bit_cast<std::uint64_t>(parallel_block_sum(10007, block)));
  }
  set_worker_count(0);
  for (std::uint64_t b : bits) CHECK(b == bits.front());
}

TEST_CASE("worker count honours the environment and the override") {
  setenv("RECTIKERNEL_THREADS", "3", 1);
  CHECK(worker_count() == 3);
  set_worker_count(5);
  CHECK(worker_count() == 5);
  set_worker_count(0);
  CHECK(worker_count() == 3);
  unsetenv("RECTIKERNEL_THREADS");
  CHECK(worker_count() >= 1);
}

TEST_CASE("every block runs once") {
  std::vector<int> hits(1000, 0);
  parallel_for_blocks(hits.size(), [&](std::size_t b) { hits[b] += 1; });
  for (int h : hits) CHECK(h == 1);
}

TEST_CASE("splitmix64 reference value") {
  // first output of the reference generator seeded with 0
  CHECK(splitmix64(0) == 0xe220a8397b1dcdafULL);
}
