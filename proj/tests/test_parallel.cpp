#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>

#include "pufkey/parallel.hpp"

using namespace pufkey;

TEST_CASE("parallel_for covers every index exactly once") {
  for (ExecMode mode : {ExecMode::serial, ExecMode::parallel}) {
    std::vector<int> hits(1000, 0);
    parallel_for(hits.size(), mode, [&](std::size_t i) { ++hits[i]; });
    CHECK(std::accumulate(hits.begin(), hits.end(), 0) == 1000);
    for (int h : hits) CHECK(h == 1);
  }
}

TEST_CASE("chunked_sum is mode independent and close to the plain sum") {
  auto item = [](std::size_t i) {
    return std::sin(static_cast<double>(i)) / (1.0 + static_cast<double>(i));
  };
  const std::size_t n = 100000;
  const double serial = chunked_sum(n, 1024, ExecMode::serial, item);
  const double parallel = chunked_sum(n, 1024, ExecMode::parallel, item);
  CHECK(serial == parallel);  // bitwise: same chunking, fixed reduce order
  double plain = 0.0;
  for (std::size_t i = 0; i < n; ++i) plain += item(i);
  CHECK(serial == doctest::Approx(plain).epsilon(1e-12));
  CHECK(chunked_sum(0, 16, ExecMode::parallel, item) == 0.0);
}
