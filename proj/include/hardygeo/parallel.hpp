#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace hardygeo {

// Global worker cap (CLI --threads). 0 = library default.
void set_thread_cap(int n);
int thread_cap();

// Toggle for the serial reference path; tests flip this to compare kernels.
void set_parallel_enabled(bool on);
bool parallel_enabled();

// Data-parallel loop over [0,n). Iterations must be independent.
template <class F>
void parallel_for(int64_t n, F&& body) {
#ifdef _OPENMP
  if (parallel_enabled() && n > 2048) {
    int cap = thread_cap();
#pragma omp parallel for schedule(static) num_threads(cap > 0 ? cap : omp_get_max_threads())
    for (int64_t i = 0; i < n; ++i) body(i);
    return;
  }
#endif
  for (int64_t i = 0; i < n; ++i) body(i);
}

// Deterministic reduction: fixed-size chunks are summed independently (in
// parallel), then combined in chunk order, so the result does not depend on
// the number of workers.
template <class F>
double deterministic_sum(int64_t n, F&& term) {
  const int64_t chunk = 4096;
  int64_t nchunks = (n + chunk - 1) / chunk;
  if (nchunks <= 1) {
    double s = 0.0;
    for (int64_t i = 0; i < n; ++i) s += term(i);
    return s;
  }
  std::vector<double> partial(static_cast<size_t>(nchunks), 0.0);
  parallel_for(nchunks, [&](int64_t c) {
    double s = 0.0;
    int64_t hi = std::min(n, (c + 1) * chunk);
    for (int64_t i = c * chunk; i < hi; ++i) s += term(i);
    partial[static_cast<size_t>(c)] = s;
  });
  double s = 0.0;
  for (double v : partial) s += v;
  return s;
}

}  // namespace hardygeo
