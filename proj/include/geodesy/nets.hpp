#pragma once

// Well-separated subsamples and covering-radius estimates.

#include <cstddef>
#include <optional>
#include <utility>
#include <variant>
#include <vector>

#include "geodesy/point_cloud.hpp"

namespace geodesy {

struct NetResult {
  std::vector<std::size_t> selected;  ///< indices into the parent cloud, anchors first
  double separation = 0.0;            ///< eps / 2
  double cover_radius_bound = 0.0;    ///< parent covering radius + eps / 2
};

/// Returned instead of a net when the two anchors are within eps/2 of each other; the chord
/// between them is then already the distance estimate.
struct AnchorsTooClose {
  double chord = 0.0;
};

using NetOutcome = std::variant<NetResult, AnchorsTooClose>;

/// Greedy eps/2-separated subset. Anchors (if any) are taken first, then the remaining points in
/// index order; each accepted point removes everything strictly closer than eps/2.
/// `parent_cover` is the covering radius assumed for the parent cloud (defaults to eps).
NetOutcome extract_net(const PointCloud& cloud, double eps,
                       std::optional<std::pair<std::size_t, std::size_t>> anchors = std::nullopt,
                       std::optional<double> parent_cover = std::nullopt);

/// Anchor-free convenience overload.
NetResult extract_net_plain(const PointCloud& cloud, double eps);

/// max over reference points of the distance to the nearest cloud point.
double covering_radius(const PointCloud& cloud, const PointCloud& reference);

/// Resolution estimate: max over points of the distance to the ceil(ln n)-th nearest neighbour.
double estimate_resolution(const PointCloud& cloud);

}  // namespace geodesy
