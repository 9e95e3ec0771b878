#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "geodesy/point_cloud.hpp"

namespace geodesy {

/// Symmetric n x n distance matrix with zero diagonal and optional missing entries.
/// Only the upper triangle is stored, so symmetry holds by construction.
class DistanceMatrix {
 public:
  DistanceMatrix() = default;
  explicit DistanceMatrix(std::size_t n);

  std::size_t size() const { return n_; }

  /// Sets d(i,j) = d(j,i). Negative or NaN values are rejected; +inf is allowed (unreachable).
  void set(std::size_t i, std::size_t j, double value);
  void clear(std::size_t i, std::size_t j);
  bool has(std::size_t i, std::size_t j) const;
  /// Value at (i,j); throws InvalidInput if missing.
  double at(std::size_t i, std::size_t j) const;
  std::optional<double> get(std::size_t i, std::size_t j) const;

  bool complete() const;
  /// Dense copy; throws InvalidInput if any entry is missing.
  Mat to_dense() const;
  /// Restriction to the given indices, in order.
  DistanceMatrix submatrix(const std::vector<std::size_t>& indices) const;

  static DistanceMatrix euclidean(const PointCloud& cloud);
  static DistanceMatrix from_dense(const Mat& d);

 private:
  std::size_t slot(std::size_t i, std::size_t j) const;

  std::size_t n_ = 0;
  std::vector<double> upper_;  // strict upper triangle, row-major
  std::vector<bool> present_;
};

/// n x k coordinates plus provenance for later evaluation.
struct Embedding {
  Mat coords;  ///< n x k
  std::string method;
  std::string parameters;

  std::size_t size() const { return static_cast<std::size_t>(coords.rows()); }
  int dim() const { return static_cast<int>(coords.cols()); }
};

}  // namespace geodesy
