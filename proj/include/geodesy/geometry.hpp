#pragma once

// Elementary geometry on points, simplices, affine subspaces and polylines.

#include <span>
#include <utility>
#include <vector>

#include "geodesy/point_cloud.hpp"

namespace geodesy {

struct Simplex {
  std::vector<Vec> vertices;  ///< k+1 points in R^d
  int dimension() const { return static_cast<int>(vertices.size()) - 1; }
};

/// k-dimensional affine subspace through `base`, spanned by the orthonormal columns of `basis` (d x k).
struct AffineSubspace {
  Vec base;
  Mat basis;

  int dimension() const { return static_cast<int>(basis.cols()); }
  int ambient_dim() const { return static_cast<int>(base.size()); }
  /// Orthogonal projection of x onto the subspace.
  Vec project(const Vec& x) const;
  /// Coordinates of the projection of x in the basis (k-vector).
  Vec local_coords(const Vec& x) const;
};

/// Builds an AffineSubspace by orthonormalizing the given direction columns (d x k).
/// Throws InvalidInput if the directions are rank deficient.
AffineSubspace make_subspace(const Vec& base, const Mat& directions);

struct Polyline {
  std::vector<Vec> vertices;
};

/// Sum of segment lengths. Throws InvalidInput with fewer than two vertices.
double polyline_length(const Polyline& p);

struct Thickness {
  double value = 0.0;  ///< smallest altitude / diameter; 0 when degenerate
  bool degenerate = false;
};

/// Upper bound sqrt((k+1)/(2k)), attained by regular k-simplices.
double max_thickness(int k);

/// Rank test uses the smallest singular value of the edge matrix against 1e-9 x diameter.
Thickness simplex_thickness(const Simplex& s);

double simplex_diameter(const Simplex& s);

/// Maximum principal angle in [0, pi/2]. Throws InvalidInput on dimension mismatch.
double subspace_angle(const AffineSubspace& a, const AffineSubspace& b);

double point_to_subspace_distance(const Vec& x, const AffineSubspace& t);

/// Smallest xi with | |F(x)-F(y)| - |x-y| | <= xi |x-y| over all supplied (source, image) pairs.
/// Throws InvalidInput with fewer than two pairs or duplicate sources.
double distortion_of_map(std::span<const std::pair<Vec, Vec>> pairs);

}  // namespace geodesy
