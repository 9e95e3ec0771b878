#include "geodesy/kernels.hpp"

#if defined(__aarch64__)

#include <arm_neon.h>

namespace geodesy::kernels::neon {

namespace {

inline float64x2_t lane_squared_distance(const double* const* cols, std::size_t d, const double* q, std::size_t j) {
  float64x2_t acc = vdupq_n_f64(0.0);
  for (std::size_t c = 0; c < d; ++c) {
    const float64x2_t diff = vsubq_f64(vld1q_f64(cols[c] + j), vdupq_n_f64(q[c]));
    acc = vaddq_f64(acc, vmulq_f64(diff, diff));
  }
  return acc;
}

double tail(const double* const* cols, std::size_t d, const double* q, std::size_t j) {
  double acc = 0.0;
  for (std::size_t c = 0; c < d; ++c) {
    const double diff = cols[c][j] - q[c];
    acc = acc + diff * diff;
  }
  return acc;
}

}  // namespace

void squared_distances(ColumnView points, std::span<const double> query, std::span<double> out) {
  const std::size_t d = points.columns.size();
  const double* const* cols = points.columns.data();
  std::size_t j = 0;
  for (; j + 2 <= points.n; j += 2) vst1q_f64(out.data() + j, lane_squared_distance(cols, d, query.data(), j));
  for (; j < points.n; ++j) out[j] = tail(cols, d, query.data(), j);
}

void min_squared_distances(ColumnView points, std::span<const double> query, std::span<double> mins) {
  const std::size_t d = points.columns.size();
  const double* const* cols = points.columns.data();
  std::size_t j = 0;
  for (; j + 2 <= points.n; j += 2) {
    const float64x2_t acc = lane_squared_distance(cols, d, query.data(), j);
    const float64x2_t cur = vld1q_f64(mins.data() + j);
    vst1q_f64(mins.data() + j, vbslq_f64(vcltq_f64(acc, cur), acc, cur));
  }
  for (; j < points.n; ++j) {
    const double acc = tail(cols, d, query.data(), j);
    mins[j] = acc < mins[j] ? acc : mins[j];
  }
}

}  // namespace geodesy::kernels::neon

#endif
