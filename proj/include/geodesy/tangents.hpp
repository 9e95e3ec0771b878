#pragma once

// Tangent-plane estimation by local principal components centred at each sample point.

#include <cstddef>
#include <vector>

#include "geodesy/geometry.hpp"
#include "geodesy/surfaces.hpp"

namespace geodesy {

struct TangentField {
  std::vector<AffineSubspace> frames;        ///< one per estimated point; empty basis when unusable
  std::vector<std::size_t> points;           ///< index of each frame's base point in the cloud
  std::vector<std::size_t> neighbor_counts;  ///< |N_i|, including the point itself
  std::vector<double> gap_ratio;             ///< lambda_k / lambda_{k+1}; +inf when lambda_{k+1} = 0
  std::vector<char> usable;
  std::vector<char> degenerate_gap;
  double radius_h = 0.0;
  int k = 0;

  std::size_t size() const { return frames.size(); }
  bool all_usable() const;
};

/// Frames at every point of `cloud`.
TangentField estimate_tangents(const PointCloud& cloud, int k, double h);

/// Frames at the listed points only, with neighbourhoods drawn from the whole cloud.
TangentField estimate_tangents_at(const PointCloud& cloud, const std::vector<std::size_t>& points, int k, double h);

/// Default bandwidth multiplier A in h = A * eps_hat.
inline constexpr double kDefaultTangentScale = 4.0;

struct TangentErrorProfile {
  std::vector<double> angles;          ///< principal angle to the analytic tangent, usable frames only
  std::vector<std::size_t> evaluated;  ///< frame indices that produced `angles`
  std::vector<std::size_t> skipped;    ///< unusable frame indices
};

TangentErrorProfile tangent_error_profile(const TangentField& field, const SurfaceSpec& spec);

}  // namespace geodesy
