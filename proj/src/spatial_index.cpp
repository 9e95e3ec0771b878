#include "geodesy/spatial_index.hpp"

#include <algorithm>
#include <cmath>

#include "geodesy/error.hpp"

namespace geodesy {

std::size_t RadiusIndex::KeyHash::operator()(const std::vector<std::int64_t>& key) const noexcept {
  std::uint64_t h = 1469598103934665603ULL;
  for (std::int64_t k : key) {
    h ^= static_cast<std::uint64_t>(k) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  }
  return static_cast<std::size_t>(h);
}

RadiusIndex::RadiusIndex(const PointCloud& cloud, double cell_size) : cloud_(&cloud), cell_(cell_size) {
  if (!(cell_size > 0.0)) invalid_input("grid cell size must be positive");
  for (std::size_t i = 0; i < cloud.size(); ++i) buckets_[key_of(cloud.point(i))].push_back(i);
}

std::vector<std::int64_t> RadiusIndex::key_of(const Vec& q) const {
  std::vector<std::int64_t> key(static_cast<std::size_t>(q.size()));
  for (Eigen::Index c = 0; c < q.size(); ++c) key[static_cast<std::size_t>(c)] = static_cast<std::int64_t>(std::floor(q(c) / cell_));
  return key;
}

std::vector<std::size_t> RadiusIndex::query(const Vec& q, double r) const {
  const PointCloud& cloud = *cloud_;
  const double r2 = r * r;
  std::vector<std::size_t> out;
  const auto reach = static_cast<std::int64_t>(std::ceil(r / cell_));
  const int d = cloud.ambient_dim();
  const double span = static_cast<double>(2 * reach + 1);
  const bool scan = std::pow(span, d) > static_cast<double>(std::max<std::size_t>(cloud.size(), 1));

  auto consider = [&](std::size_t j) {
    double acc = 0.0;
    for (int c = 0; c < d; ++c) {
      const double diff = cloud.coord(j, c) - q(c);
      acc += diff * diff;
    }
    if (acc <= r2) out.push_back(j);
  };

  if (scan) {
    for (std::size_t j = 0; j < cloud.size(); ++j) consider(j);
    return out;
  }

  const std::vector<std::int64_t> center = key_of(q);
  std::vector<std::int64_t> key(center.size());
  std::vector<std::int64_t> offset(center.size(), -reach);
  while (true) {
    for (std::size_t c = 0; c < center.size(); ++c) key[c] = center[c] + offset[c];
    if (auto it = buckets_.find(key); it != buckets_.end()) {
      for (std::size_t j : it->second) consider(j);
    }
    std::size_t c = 0;
    while (c < offset.size() && offset[c] == reach) offset[c++] = -reach;
    if (c == offset.size()) break;
    ++offset[c];
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace geodesy
