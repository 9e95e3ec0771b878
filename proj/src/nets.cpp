#include "geodesy/nets.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "geodesy/error.hpp"
#include "geodesy/parallel.hpp"
#include "geodesy/spatial_index.hpp"

namespace geodesy {

namespace {

constexpr std::size_t kBruteForceLimit = 10000;

}  // namespace

NetOutcome extract_net(const PointCloud& cloud, double eps, std::optional<std::pair<std::size_t, std::size_t>> anchors,
                       std::optional<double> parent_cover) {
  if (!(eps > 0.0)) invalid_input("net radius must be positive");
  const std::size_t n = cloud.size();
  const double half = eps / 2;
  std::vector<std::size_t> order;
  order.reserve(n + 2);
  if (anchors) {
    const auto [a, b] = *anchors;
    if (a >= n || b >= n) invalid_input("anchor index out of range");
    if (a == b) invalid_input("anchors must be distinct");
    const double chord = cloud.distance(a, b);
    if (chord <= half) return AnchorsTooClose{chord};
    order.push_back(a);
    order.push_back(b);
  }
  for (std::size_t i = 0; i < n; ++i) order.push_back(i);

  std::vector<char> removed(n, 0);
  NetResult net;
  net.separation = half;
  net.cover_radius_bound = parent_cover.value_or(eps) + half;
  const double half2 = half * half;

  std::optional<RadiusIndex> index;
  if (n > kBruteForceLimit) index.emplace(cloud, half);
  std::vector<double> sq(n);

  for (std::size_t i : order) {
    if (removed[i]) continue;
    net.selected.push_back(i);
    const Vec p = cloud.point(i);
    if (index) {
      for (std::size_t j : index->query(p, half)) {
        if ((cloud.point(j) - p).squaredNorm() < half2) removed[j] = 1;
      }
    } else {
      kernels::squared_distances(cloud.columns(), {p.data(), static_cast<std::size_t>(p.size())}, sq);
      for (std::size_t j = 0; j < n; ++j) {
        if (sq[j] < half2) removed[j] = 1;
      }
    }
    removed[i] = 1;
  }
  return net;
}

NetResult extract_net_plain(const PointCloud& cloud, double eps) { return std::get<NetResult>(extract_net(cloud, eps)); }

double covering_radius(const PointCloud& cloud, const PointCloud& reference) {
  if (reference.size() == 0) invalid_input("covering radius needs a nonempty reference");
  if (cloud.size() == 0) return std::numeric_limits<double>::infinity();
  if (cloud.ambient_dim() != reference.ambient_dim()) invalid_input("dimension mismatch");
  const std::size_t workers = worker_count();
  const std::size_t chunk = (reference.size() + workers - 1) / workers;
  std::vector<double> chunk_max(workers, 0.0);
  parallel_for(workers, [&](std::size_t w) {
    const std::size_t lo = w * chunk;
    const std::size_t hi = std::min(reference.size(), lo + chunk);
    if (lo >= hi) return;
    std::vector<const double*> cols(static_cast<std::size_t>(reference.ambient_dim()));
    for (int c = 0; c < reference.ambient_dim(); ++c) cols[static_cast<std::size_t>(c)] = reference.coords().col(c).data() + lo;
    std::vector<double> mins(hi - lo, std::numeric_limits<double>::infinity());
    const kernels::ColumnView view{cols, hi - lo};
    for (std::size_t i = 0; i < cloud.size(); ++i) {
      const Vec q = cloud.point(i);
      kernels::min_squared_distances(view, {q.data(), static_cast<std::size_t>(q.size())}, mins);
    }
    chunk_max[w] = *std::max_element(mins.begin(), mins.end());
  });
  return std::sqrt(*std::max_element(chunk_max.begin(), chunk_max.end()));
}

double estimate_resolution(const PointCloud& cloud) {
  const std::size_t n = cloud.size();
  if (n < 2) invalid_input("resolution estimate needs at least two points");
  const auto rank = std::min<std::size_t>(n - 1, static_cast<std::size_t>(std::ceil(std::log(static_cast<double>(n)))));
  std::vector<double> kth(n);
  if (n <= kBruteForceLimit) {
    parallel_for(n, [&](std::size_t i) {
      std::vector<double> sq = cloud.squared_distances_to(cloud.point(i));
      sq[i] = -1.0;  // the point itself sorts first
      std::nth_element(sq.begin(), sq.begin() + static_cast<std::ptrdiff_t>(rank), sq.end());
      kth[i] = sq[rank];
    });
    return std::sqrt(*std::max_element(kth.begin(), kth.end()));
  }

  // Grid search with a growing radius; a query that returns more than `rank` other points
  // contains the exact rank-th neighbour.
  std::vector<double> probe;
  for (std::size_t i = 0; i < n; i += n / 64) {
    std::vector<double> sq = cloud.squared_distances_to(cloud.point(i));
    sq[i] = -1.0;
    std::nth_element(sq.begin(), sq.begin() + static_cast<std::ptrdiff_t>(rank), sq.end());
    probe.push_back(sq[rank]);
  }
  std::nth_element(probe.begin(), probe.begin() + static_cast<std::ptrdiff_t>(probe.size() / 2), probe.end());
  const double start = 1.5 * std::sqrt(probe[probe.size() / 2]);
  const RadiusIndex index(cloud, start);
  const int d = cloud.ambient_dim();
  parallel_for(n, [&](std::size_t i) {
    const Vec q = cloud.point(i);
    for (double r = start;; r *= 2.0) {
      const std::vector<std::size_t> near = index.query(q, r);
      if (near.size() <= rank && near.size() < n) continue;
      std::vector<double> sq;
      sq.reserve(near.size());
      for (std::size_t j : near) {
        double acc = 0.0;
        for (int c = 0; c < d; ++c) {
          const double diff = cloud.coords()(static_cast<Eigen::Index>(j), c) - q(c);
          acc = acc + diff * diff;
        }
        sq.push_back(j == i ? -1.0 : acc);
      }
      std::nth_element(sq.begin(), sq.begin() + static_cast<std::ptrdiff_t>(rank), sq.end());
      kth[i] = sq[rank];
      return;
    }
  });
  return std::sqrt(*std::max_element(kth.begin(), kth.end()));
}

}  // namespace geodesy
