#include "geodesy/tangents.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <limits>
#include <numeric>

#include "geodesy/error.hpp"
#include "geodesy/parallel.hpp"
#include "geodesy/spatial_index.hpp"

namespace geodesy {

bool TangentField::all_usable() const {
  return std::all_of(usable.begin(), usable.end(), [](char u) { return u != 0; });
}

TangentField estimate_tangents_at(const PointCloud& cloud, const std::vector<std::size_t>& points, int k, double h) {
  if (!(h > 0.0)) invalid_input("tangent bandwidth must be positive");
  const int d = cloud.ambient_dim();
  if (k < 1 || k >= d) invalid_input("tangent dimension must satisfy 1 <= k < d");
  for (std::size_t p : points) {
    if (p >= cloud.size()) invalid_input("tangent point index out of range");
  }
  const std::size_t m = points.size();
  TangentField field;
  field.radius_h = h;
  field.k = k;
  field.points = points;
  field.frames.resize(m);
  field.neighbor_counts.assign(m, 0);
  field.gap_ratio.assign(m, 0.0);
  field.usable.assign(m, 0);
  field.degenerate_gap.assign(m, 0);

  const RadiusIndex index(cloud, h);
  parallel_for(m, [&](std::size_t t) {
    const std::size_t i = points[t];
    const Vec xi = cloud.point(i);
    const std::vector<std::size_t> nbrs = index.query(xi, h);
    field.neighbor_counts[t] = nbrs.size();
    AffineSubspace& frame = field.frames[t];
    frame.base = xi;
    frame.basis = Mat(d, 0);
    if (nbrs.size() < static_cast<std::size_t>(k + 1)) return;

    Mat sigma = Mat::Zero(d, d);
    for (std::size_t j : nbrs) {
      const Vec diff = cloud.point(j) - xi;
      sigma.noalias() += diff * diff.transpose();
    }
    sigma /= static_cast<double>(nbrs.size());
    const Eigen::SelfAdjointEigenSolver<Mat> eig(sigma);
    const Vec& lambda = eig.eigenvalues();  // ascending
    const double lk = lambda(d - k);
    const double lk1 = lambda(d - k - 1);
    if (!(lk > 0.0)) return;
    Mat basis = eig.eigenvectors().rightCols(k).rowwise().reverse();
    frame.basis = basis;
    field.usable[t] = 1;
    field.gap_ratio[t] = lk1 > 0.0 ? lk / lk1 : std::numeric_limits<double>::infinity();
    field.degenerate_gap[t] = lk <= lk1 * (1 + 1e-9) ? 1 : 0;
  });
  return field;
}

TangentField estimate_tangents(const PointCloud& cloud, int k, double h) {
  std::vector<std::size_t> all(cloud.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  return estimate_tangents_at(cloud, all, k, h);
}

TangentErrorProfile tangent_error_profile(const TangentField& field, const SurfaceSpec& spec) {
  TangentErrorProfile out;
  for (std::size_t t = 0; t < field.size(); ++t) {
    if (!field.usable[t]) {
      out.skipped.push_back(t);
      continue;
    }
    const AffineSubspace truth = analytic_tangent(spec, field.frames[t].base);
    out.angles.push_back(subspace_angle(field.frames[t], truth));
    out.evaluated.push_back(t);
  }
  return out;
}

}  // namespace geodesy
