#include "geodesy/point_cloud.hpp"

#include <cmath>

#include "geodesy/error.hpp"

namespace geodesy {

PointCloud::PointCloud(Mat coords, int intrinsic_dim) : coords_(std::move(coords)), intrinsic_dim_(intrinsic_dim) {
  if (!coords_.allFinite()) invalid_input("point cloud contains non-finite coordinates");
  if (intrinsic_dim_ < 0 || intrinsic_dim_ > coords_.cols()) invalid_input("intrinsic dimension out of range");
  refresh_columns();
}

PointCloud::PointCloud(const PointCloud& other) : coords_(other.coords_), intrinsic_dim_(other.intrinsic_dim_) {
  refresh_columns();
}

PointCloud::PointCloud(PointCloud&& other) noexcept
    : coords_(std::move(other.coords_)), intrinsic_dim_(other.intrinsic_dim_) {
  refresh_columns();
  other.refresh_columns();
}

PointCloud& PointCloud::operator=(PointCloud other) noexcept {
  coords_.swap(other.coords_);
  intrinsic_dim_ = other.intrinsic_dim_;
  refresh_columns();
  return *this;
}

void PointCloud::refresh_columns() {
  column_ptrs_.resize(static_cast<std::size_t>(coords_.cols()));
  for (Eigen::Index c = 0; c < coords_.cols(); ++c) column_ptrs_[static_cast<std::size_t>(c)] = coords_.col(c).data();
}

PointCloud PointCloud::subset(const std::vector<std::size_t>& indices) const {
  Mat sub(static_cast<Eigen::Index>(indices.size()), coords_.cols());
  for (std::size_t r = 0; r < indices.size(); ++r) {
    if (indices[r] >= size()) invalid_input("subset index out of range");
    sub.row(static_cast<Eigen::Index>(r)) = coords_.row(static_cast<Eigen::Index>(indices[r]));
  }
  return PointCloud(std::move(sub), intrinsic_dim_);
}

std::vector<double> PointCloud::squared_distances_to(const Vec& q) const {
  std::vector<double> out(size());
  kernels::squared_distances(columns(), {q.data(), static_cast<std::size_t>(q.size())}, out);
  return out;
}

double PointCloud::distance(std::size_t i, std::size_t j) const {
  return (coords_.row(static_cast<Eigen::Index>(i)) - coords_.row(static_cast<Eigen::Index>(j))).norm();
}

}  // namespace geodesy
