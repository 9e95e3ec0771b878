#include "geodesy/distance_matrix.hpp"

#include <cmath>

#include "geodesy/error.hpp"

namespace geodesy {

DistanceMatrix::DistanceMatrix(std::size_t n)
    : n_(n), upper_(n * (n > 0 ? n - 1 : 0) / 2, 0.0), present_(n * (n > 0 ? n - 1 : 0) / 2, false) {}

std::size_t DistanceMatrix::slot(std::size_t i, std::size_t j) const {
  if (i > j) std::swap(i, j);
  // Offset of row i in the strict upper triangle.
  return i * (2 * n_ - i - 1) / 2 + (j - i - 1);
}

void DistanceMatrix::set(std::size_t i, std::size_t j, double value) {
  if (i >= n_ || j >= n_) invalid_input("distance matrix index out of range");
  if (std::isnan(value) || value < 0.0) invalid_input("distances must be nonnegative");
  if (i == j) {
    if (value != 0.0) invalid_input("diagonal distances must be zero");
    return;
  }
  const std::size_t s = slot(i, j);
  upper_[s] = value;
  present_[s] = true;
}

void DistanceMatrix::clear(std::size_t i, std::size_t j) {
  if (i == j) return;
  present_[slot(i, j)] = false;
}

bool DistanceMatrix::has(std::size_t i, std::size_t j) const {
  if (i >= n_ || j >= n_) return false;
  return i == j || present_[slot(i, j)];
}

std::optional<double> DistanceMatrix::get(std::size_t i, std::size_t j) const {
  if (!has(i, j)) return std::nullopt;
  return i == j ? 0.0 : upper_[slot(i, j)];
}

double DistanceMatrix::at(std::size_t i, std::size_t j) const {
  auto v = get(i, j);
  if (!v) invalid_input("missing distance entry");
  return *v;
}

bool DistanceMatrix::complete() const {
  for (bool p : present_) {
    if (!p) return false;
  }
  return true;
}

Mat DistanceMatrix::to_dense() const {
  Mat d = Mat::Zero(static_cast<Eigen::Index>(n_), static_cast<Eigen::Index>(n_));
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = i + 1; j < n_; ++j) {
      const double v = at(i, j);
      d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
      d(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = v;
    }
  }
  return d;
}

DistanceMatrix DistanceMatrix::submatrix(const std::vector<std::size_t>& indices) const {
  DistanceMatrix sub(indices.size());
  for (std::size_t a = 0; a < indices.size(); ++a) {
    for (std::size_t b = a + 1; b < indices.size(); ++b) {
      if (auto v = get(indices[a], indices[b])) sub.set(a, b, *v);
    }
  }
  return sub;
}

DistanceMatrix DistanceMatrix::euclidean(const PointCloud& cloud) {
  DistanceMatrix d(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    for (std::size_t j = i + 1; j < cloud.size(); ++j) d.set(i, j, cloud.distance(i, j));
  }
  return d;
}

DistanceMatrix DistanceMatrix::from_dense(const Mat& m) {
  if (m.rows() != m.cols()) invalid_input("distance matrix must be square");
  DistanceMatrix d(static_cast<std::size_t>(m.rows()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < m.cols(); ++j) {
      d.set(static_cast<std::size_t>(i), static_cast<std::size_t>(j), m(i, j));
    }
  }
  return d;
}

}  // namespace geodesy
