#include "geodesy/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

namespace geodesy::kernels::avx2 {

namespace {

// Separate multiply and add, no FMA.
__attribute__((target("avx2"))) inline __m256d lane_squared_distance(const double* const* cols, std::size_t d,
                                                                      const double* q, std::size_t j) {
  __m256d acc = _mm256_setzero_pd();
  for (std::size_t c = 0; c < d; ++c) {
    const __m256d diff = _mm256_sub_pd(_mm256_loadu_pd(cols[c] + j), _mm256_set1_pd(q[c]));
    acc = _mm256_add_pd(acc, _mm256_mul_pd(diff, diff));
  }
  return acc;
}

}  // namespace

__attribute__((target("avx2"))) void squared_distances(ColumnView points, std::span<const double> query,
                                                       std::span<double> out) {
  const std::size_t d = points.columns.size();
  const double* const* cols = points.columns.data();
  const std::size_t n = points.n;
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    _mm256_storeu_pd(out.data() + j, lane_squared_distance(cols, d, query.data(), j));
  }
  for (; j < n; ++j) {
    double acc = 0.0;
    for (std::size_t c = 0; c < d; ++c) {
      const double diff = cols[c][j] - query[c];
      acc = acc + diff * diff;
    }
    out[j] = acc;
  }
}

__attribute__((target("avx2"))) void min_squared_distances(ColumnView points, std::span<const double> query,
                                                           std::span<double> mins) {
  const std::size_t d = points.columns.size();
  const double* const* cols = points.columns.data();
  const std::size_t n = points.n;
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    const __m256d acc = lane_squared_distance(cols, d, query.data(), j);
    const __m256d cur = _mm256_loadu_pd(mins.data() + j);
    // _mm256_min_pd(a, b) returns b when a is not less than b.
    _mm256_storeu_pd(mins.data() + j, _mm256_min_pd(acc, cur));
  }
  for (; j < n; ++j) {
    double acc = 0.0;
    for (std::size_t c = 0; c < d; ++c) {
      const double diff = cols[c][j] - query[c];
      acc = acc + diff * diff;
    }
    mins[j] = acc < mins[j] ? acc : mins[j];
  }
}

}  // namespace geodesy::kernels::avx2

#endif
