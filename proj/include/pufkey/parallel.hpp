#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace pufkey {

// Hot loops run through these helpers in one of two modes. Results are
// bit-identical across modes and thread counts: work items write to their
// own slots, and sums are reduced over fixed chunks in index order.
enum class ExecMode { serial, parallel };

template <typename F>
void parallel_for(std::size_t n, ExecMode mode, F&& body) {
  if (mode == ExecMode::parallel) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < static_cast<long long>(n); ++i)
      body(static_cast<std::size_t>(i));
    return;
#endif
  }
  for (std::size_t i = 0; i < n; ++i) body(i);
}

// Deterministic chunked reduction: item(i) values are summed per fixed-size
// chunk, then chunk partials are added in chunk order. The chunking is part
// of the result definition, so serial and parallel agree exactly.
template <typename F>
double chunked_sum(std::size_t n, std::size_t chunk, ExecMode mode, F&& item) {
  if (n == 0) return 0.0;
  if (chunk == 0) chunk = 1;
  const std::size_t n_chunks = (n + chunk - 1) / chunk;
  std::vector<double> partial(n_chunks, 0.0);
  parallel_for(n_chunks, mode, [&](std::size_t c) {
    const std::size_t lo = c * chunk;
    const std::size_t hi = lo + chunk < n ? lo + chunk : n;
    double acc = 0.0;
    for (std::size_t i = lo; i < hi; ++i) acc += item(i);
    partial[c] = acc;
  });
  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

}  // namespace pufkey
