#include "geodesy/geometry.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

#include "geodesy/error.hpp"

namespace geodesy {

Vec AffineSubspace::project(const Vec& x) const { return base + basis * (basis.transpose() * (x - base)); }

Vec AffineSubspace::local_coords(const Vec& x) const { return basis.transpose() * (x - base); }

AffineSubspace make_subspace(const Vec& base, const Mat& directions) {
  if (directions.rows() != base.size()) invalid_input("subspace directions and base point differ in dimension");
  Eigen::HouseholderQR<Mat> qr(directions);
  const Mat r = qr.matrixQR().topRows(directions.cols()).triangularView<Eigen::Upper>();
  const double scale = directions.norm();
  for (Eigen::Index i = 0; i < directions.cols(); ++i) {
    if (std::abs(r(i, i)) <= 1e-12 * std::max(scale, 1e-300)) invalid_input("subspace directions are rank deficient");
  }
  Mat q = qr.householderQ() * Mat::Identity(directions.rows(), directions.cols());
  return {base, q};
}

double polyline_length(const Polyline& p) {
  if (p.vertices.size() < 2) invalid_input("polyline needs at least two vertices");
  double total = 0.0;
  for (std::size_t i = 1; i < p.vertices.size(); ++i) total += (p.vertices[i] - p.vertices[i - 1]).norm();
  return total;
}

double max_thickness(int k) { return std::sqrt((k + 1.0) / (2.0 * k)); }

double simplex_diameter(const Simplex& s) {
  double diam = 0.0;
  for (std::size_t i = 0; i < s.vertices.size(); ++i) {
    for (std::size_t j = i + 1; j < s.vertices.size(); ++j) diam = std::max(diam, (s.vertices[i] - s.vertices[j]).norm());
  }
  return diam;
}

namespace {

// Distance from x to the affine hull of the given points.
double distance_to_hull(const Vec& x, const std::vector<const Vec*>& pts) {
  if (pts.size() == 1) return (x - *pts[0]).norm();
  Mat edges(pts[0]->size(), static_cast<Eigen::Index>(pts.size() - 1));
  for (std::size_t i = 1; i < pts.size(); ++i) edges.col(static_cast<Eigen::Index>(i - 1)) = *pts[i] - *pts[0];
  const Vec rhs = x - *pts[0];
  const Vec coeffs = edges.colPivHouseholderQr().solve(rhs);
  return (rhs - edges * coeffs).norm();
}

}  // namespace

Thickness simplex_thickness(const Simplex& s) {
  const int k = s.dimension();
  if (k < 1) invalid_input("simplex needs at least two vertices");
  const double diam = simplex_diameter(s);
  if (diam <= 0.0) return {0.0, true};
  Mat edges(s.vertices[0].size(), k);
  for (int i = 1; i <= k; ++i) edges.col(i - 1) = s.vertices[static_cast<std::size_t>(i)] - s.vertices[0];
  if (edges.rows() < k) return {0.0, true};
  const Vec sv = Eigen::JacobiSVD<Mat>(edges).singularValues();
  if (sv(k - 1) < 1e-9 * diam) return {0.0, true};

  double min_altitude = std::numeric_limits<double>::infinity();
  for (std::size_t v = 0; v < s.vertices.size(); ++v) {
    std::vector<const Vec*> face;
    for (std::size_t u = 0; u < s.vertices.size(); ++u) {
      if (u != v) face.push_back(&s.vertices[u]);
    }
    min_altitude = std::min(min_altitude, distance_to_hull(s.vertices[v], face));
  }
  return {min_altitude / diam, false};
}

double subspace_angle(const AffineSubspace& first, const AffineSubspace& second) {
  if (first.ambient_dim() != second.ambient_dim() || first.dimension() != second.dimension()) {
    invalid_input("subspace_angle requires subspaces of equal dimension in the same ambient space");
  }
  if (first.dimension() == 0) return 0.0;
  // Canonical argument order.
  const bool swap = std::lexicographical_compare(second.basis.data(), second.basis.data() + second.basis.size(),
                                                 first.basis.data(), first.basis.data() + first.basis.size());
  const AffineSubspace& a = swap ? second : first;
  const AffineSubspace& b = swap ? first : second;
  // cos of the largest principal angle is the smallest singular value of A^T B; its sine is the
  // largest singular value of the part of B orthogonal to A. atan2 of the pair stays accurate at
  // both ends of [0, pi/2].
  const Mat cross = a.basis.transpose() * b.basis;
  const Vec cos_sv = Eigen::JacobiSVD<Mat>(cross).singularValues();
  const Mat residual = b.basis - a.basis * cross;
  const Vec sin_sv = Eigen::JacobiSVD<Mat>(residual).singularValues();
  const double c = std::clamp(cos_sv(cos_sv.size() - 1), -1.0, 1.0);
  const double s = std::clamp(sin_sv(0), 0.0, 1.0);
  return std::atan2(s, c);
}

double point_to_subspace_distance(const Vec& x, const AffineSubspace& t) {
  if (x.size() != t.ambient_dim()) invalid_input("point and subspace differ in ambient dimension");
  return (x - t.project(x)).norm();
}

double distortion_of_map(std::span<const std::pair<Vec, Vec>> pairs) {
  if (pairs.size() < 2) invalid_input("distortion needs at least two pairs");
  double xi = 0.0;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    for (std::size_t j = i + 1; j < pairs.size(); ++j) {
      const double src = (pairs[i].first - pairs[j].first).norm();
      if (src == 0.0) invalid_input("duplicate source points in distortion map");
      const double img = (pairs[i].second - pairs[j].second).norm();
      xi = std::max(xi, std::abs(img - src) / src);
    }
  }
  return xi;
}

}  // namespace geodesy
