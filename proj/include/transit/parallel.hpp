#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace transit {

// Reduction kernels used throughout stats/community. The parallel variants
// are the default path; the *_serial twins are the reference implementations
// the tests compare against. Chunk boundaries are fixed by index, not by
// thread count, so the parallel results are identical from run to run and
// across OMP_NUM_THREADS settings.

inline constexpr std::size_t kSumChunk = 4096;

/// Plain left-to-right accumulation.
double sum_serial(std::span<const double> values);

/// Chunked sum: fixed 4096-element partial sums computed in parallel,
/// combined in chunk order.
double sum_chunked(std::span<const double> values);

/// Dot-product-style sum of f(i) over [0, n) with the same fixed chunking.
/// F must be safe to call concurrently.
template <class F>
double indexed_sum_chunked(std::size_t n, F&& f) {
  if (n == 0) return 0.0;
  const std::size_t nchunks = (n + kSumChunk - 1) / kSumChunk;
  std::vector<double> partial(nchunks, 0.0);
#pragma omp parallel for schedule(static)
  for (long long c = 0; c < static_cast<long long>(nchunks); ++c) {
    const std::size_t lo = static_cast<std::size_t>(c) * kSumChunk;
    const std::size_t hi = lo + kSumChunk < n ? lo + kSumChunk : n;
    double acc = 0.0;
    for (std::size_t i = lo; i < hi; ++i) acc += f(i);
    partial[static_cast<std::size_t>(c)] = acc;
  }
  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

template <class F>
double indexed_sum_serial(std::size_t n, F&& f) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += f(i);
  return acc;
}

}  // namespace transit
