#include "geodesy/kernels.hpp"

namespace geodesy::kernels::scalar {

void squared_distances(ColumnView points, std::span<const double> query, std::span<double> out) {
  const std::size_t d = points.columns.size();
  for (std::size_t j = 0; j < points.n; ++j) {
    double acc = 0.0;
    for (std::size_t c = 0; c < d; ++c) {
      const double diff = points.columns[c][j] - query[c];
      acc = acc + diff * diff;
    }
    out[j] = acc;
  }
}

void min_squared_distances(ColumnView points, std::span<const double> query, std::span<double> mins) {
  const std::size_t d = points.columns.size();
  for (std::size_t j = 0; j < points.n; ++j) {
    double acc = 0.0;
    for (std::size_t c = 0; c < d; ++c) {
      const double diff = points.columns[c][j] - query[c];
      acc = acc + diff * diff;
    }
    // Same operand order as _mm256_min_pd(acc, mins).
    mins[j] = acc < mins[j] ? acc : mins[j];
  }
}

}  // namespace geodesy::kernels::scalar
