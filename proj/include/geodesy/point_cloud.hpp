#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <vector>

#include "geodesy/kernels.hpp"

namespace geodesy {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Ordered points in R^d stored as an n x d column-major matrix, so each coordinate
/// is a contiguous column (the layout the distance kernels consume).
class PointCloud {
 public:
  PointCloud() = default;
  PointCloud(Mat coords, int intrinsic_dim);
  PointCloud(const PointCloud& other);
  PointCloud(PointCloud&& other) noexcept;
  PointCloud& operator=(PointCloud other) noexcept;
  ~PointCloud() = default;

  std::size_t size() const { return static_cast<std::size_t>(coords_.rows()); }
  int ambient_dim() const { return static_cast<int>(coords_.cols()); }
  int intrinsic_dim() const { return intrinsic_dim_; }

  Vec point(std::size_t i) const { return coords_.row(static_cast<Eigen::Index>(i)).transpose(); }
  double coord(std::size_t i, int c) const { return coords_(static_cast<Eigen::Index>(i), c); }
  const Mat& coords() const { return coords_; }

  /// Sub-cloud with rows in the given order.
  PointCloud subset(const std::vector<std::size_t>& indices) const;

  kernels::ColumnView columns() const { return {column_ptrs_, size()}; }

  /// Squared distances from `q` to every point.
  std::vector<double> squared_distances_to(const Vec& q) const;
  double distance(std::size_t i, std::size_t j) const;

 private:
  void refresh_columns();

  Mat coords_;
  int intrinsic_dim_ = 0;
  std::vector<const double*> column_ptrs_;
};

}  // namespace geodesy
