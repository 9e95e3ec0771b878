#pragma once

#include <cstddef>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "geodesy/point_cloud.hpp"

namespace geodesy {

/// Uniform-grid bucketing of a point cloud for fixed-radius neighbour queries.
/// Falls back to a linear scan when the grid would visit more cells than there are points.
class RadiusIndex {
 public:
  RadiusIndex(const PointCloud& cloud, double cell_size);

  /// Indices j with |x_j - q| <= r, in ascending order.
  std::vector<std::size_t> query(const Vec& q, double r) const;
  std::vector<std::size_t> query(std::size_t i, double r) const { return query(cloud_->point(i), r); }

 private:
  struct KeyHash {
    std::size_t operator()(const std::vector<std::int64_t>& key) const noexcept;
  };

  std::vector<std::int64_t> key_of(const Vec& q) const;

  const PointCloud* cloud_;
  double cell_;
  std::unordered_map<std::vector<std::int64_t>, std::vector<std::size_t>, KeyHash> buckets_;
};

}  // namespace geodesy
