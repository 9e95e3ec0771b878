#include "geodesy/tdc.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>

#include "geodesy/error.hpp"
#include "geodesy/nets.hpp"
#include "geodesy/parallel.hpp"
#include "geodesy/spatial_index.hpp"

namespace geodesy {

namespace {

using P2 = Eigen::Vector2d;

double orient(const P2& p, const P2& q, const P2& r) { return (q.x() - p.x()) * (r.y() - p.y()) - (q.y() - p.y()) * (r.x() - p.x()); }

struct Chart {
  std::vector<P2> pts;
  std::vector<double> normal_sq;  // squared offset from the tangent plane, enters the lift as a negative weight
  std::vector<std::size_t> ids;  // global index, used as the perturbation order
};

// Power test in the chart: true when the lifted d lies strictly below the plane through the lifted
// a, b, c. A point's lift is its squared chart norm plus its squared normal offset, so the test asks
// whether some ball centred on the tangent plane through a, b, c contains d. Exact ties are broken by
// an infinitesimal lift that grows with the global index.
bool in_circle(const Chart& ch, std::size_t a, std::size_t b, std::size_t c, std::size_t d) {
  const P2& pa = ch.pts[a];
  const P2& pb = ch.pts[b];
  const P2& pc = ch.pts[c];
  const P2& pd = ch.pts[d];
  const double o = orient(pa, pb, pc);
  if (o == 0.0) return false;
  const double adx = pa.x() - pd.x(), ady = pa.y() - pd.y();
  const double bdx = pb.x() - pd.x(), bdy = pb.y() - pd.y();
  const double cdx = pc.x() - pd.x(), cdy = pc.y() - pd.y();
  const double wd = ch.normal_sq[d];
  const double la = adx * adx + ady * ady + ch.normal_sq[a] - wd;
  const double lb = bdx * bdx + bdy * bdy + ch.normal_sq[b] - wd;
  const double lc = cdx * cdx + cdy * cdy + ch.normal_sq[c] - wd;
  const double det = la * (bdx * cdy - bdy * cdx) + lb * (cdx * ady - cdy * adx) + lc * (adx * bdy - ady * bdx);
  const double scale = std::max({std::abs(adx), std::abs(ady), std::abs(bdx), std::abs(bdy), std::abs(cdx), std::abs(cdy)});
  const double s = o > 0.0 ? det : -det;
  const double tol = 1e-12 * scale * scale * scale * scale;
  if (s > tol) return true;
  if (s < -tol) return false;

  std::array<std::size_t, 4> order{a, b, c, d};
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return ch.ids[x] > ch.ids[y]; });
  const std::array<std::size_t, 3> tri{a, b, c};
  for (std::size_t p : order) {
    if (p == d) return false;
    const auto at = static_cast<std::size_t>(std::find(tri.begin(), tri.end(), p) - tri.begin());
    const P2& q = ch.pts[tri[(at + 1) % 3]];
    const P2& r = ch.pts[tri[(at + 2) % 3]];
    const double lambda = orient(q, r, pd) / o;
    if (lambda > 0.0) return true;
    if (lambda < 0.0) return false;
  }
  return false;
}

// Triangles (centre, u, w) of the Delaunay star of `centre`, as local index pairs in CCW order.
std::vector<std::array<std::size_t, 2>> delaunay_star(const Chart& ch, std::size_t centre) {
  const std::size_t n = ch.pts.size();
  std::vector<std::array<std::size_t, 2>> out;
  // The neighbour minimising lift / chart distance spans a lower-hull edge with the centre.
  std::size_t first = n;
  double best_d = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    if (j == centre) continue;
    const double r2 = (ch.pts[j] - ch.pts[centre]).squaredNorm();
    if (r2 == 0.0) continue;
    const double d = (r2 + ch.normal_sq[j]) / std::sqrt(r2);
    if (first == n || d < best_d || (d == best_d && ch.ids[j] < ch.ids[first])) {
      first = j;
      best_d = d;
    }
  }
  if (first == n) return out;

  // side = +1 walks counter-clockwise (candidates left of centre->a), -1 clockwise.
  auto step = [&](std::size_t a, int side) {
    std::size_t best = n;
    for (std::size_t q = 0; q < n; ++q) {
      if (q == centre || q == a) continue;
      const double o = orient(ch.pts[centre], ch.pts[a], ch.pts[q]);
      const double scale = (ch.pts[a] - ch.pts[centre]).norm() * (ch.pts[q] - ch.pts[centre]).norm();
      if (side * o <= 1e-12 * scale) continue;
      if (best == n || in_circle(ch, centre, a, best, q)) best = q;
    }
    return best;
  };

  bool closed = false;
  std::size_t a = first;
  for (std::size_t guard = 0; guard < n; ++guard) {
    const std::size_t b = step(a, +1);
    if (b == n) break;
    out.push_back({a, b});
    if (b == first) {
      closed = true;
      break;
    }
    a = b;
  }
  if (!closed) {
    a = first;
    for (std::size_t guard = 0; guard < n; ++guard) {
      const std::size_t b = step(a, -1);
      if (b == n) break;
      out.push_back({b, a});
      a = b;
    }
  }
  return out;
}

double cloud_diameter(const PointCloud& cloud) {
  double best = 0.0;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const std::vector<double> sq = cloud.squared_distances_to(cloud.point(i));
    best = std::max(best, *std::max_element(sq.begin(), sq.end()));
  }
  return std::sqrt(best);
}

Star star_from_neighbors(const PointCloud& cloud, const TangentField& field, std::size_t i,
                         const std::vector<std::size_t>& nbrs, double max_sq_edge, const Jitter& jitter) {
  Star star;
  if (!field.usable[i] || field.frames[i].basis.cols() != 2) {
    star.status = StarStatus::UnusableFrame;
    return star;
  }
  if (nbrs.size() < 3) {
    star.status = StarStatus::TooFewNeighbors;
    return star;
  }
  const Mat& basis = field.frames[i].basis;
  const Vec xi = cloud.point(i);
  Chart ch;
  std::size_t centre = 0;
  for (std::size_t j : nbrs) {
    Vec x = cloud.point(j) - xi;
    if (!jitter.empty() && jitter[j].size() > 0) x += jitter[j];
    if (j == i) centre = ch.pts.size();
    const Vec local = basis.transpose() * x;
    ch.pts.push_back(local);
    ch.normal_sq.push_back(std::max(0.0, x.squaredNorm() - local.squaredNorm()));
    ch.ids.push_back(j);
  }
  bool spread = false;
  for (std::size_t q = 0; q < ch.pts.size() && !spread; ++q) {
    for (std::size_t r = q + 1; r < ch.pts.size() && !spread; ++r) {
      const double o = orient(ch.pts[centre], ch.pts[q], ch.pts[r]);
      const double scale = (ch.pts[q] - ch.pts[centre]).norm() * (ch.pts[r] - ch.pts[centre]).norm();
      spread = std::abs(o) > 1e-12 * scale;
    }
  }
  if (!spread) {
    star.status = StarStatus::Collinear;
    return star;
  }
  for (const auto& [u, w] : delaunay_star(ch, centre)) {
    const std::size_t gu = ch.ids[u], gw = ch.ids[w];
    const double e1 = (cloud.point(gu) - xi).squaredNorm();
    const double e2 = (cloud.point(gw) - xi).squaredNorm();
    const double e3 = (cloud.point(gu) - cloud.point(gw)).squaredNorm();
    if (e1 > max_sq_edge || e2 > max_sq_edge || e3 > max_sq_edge) continue;
    Triangle t{i, gu, gw};
    std::sort(t.begin(), t.end());
    star.triangles.push_back(t);
  }
  std::sort(star.triangles.begin(), star.triangles.end());
  star.triangles.erase(std::unique(star.triangles.begin(), star.triangles.end()), star.triangles.end());
  return star;
}

}  // namespace

Star tangential_star(const PointCloud& cloud, const TangentField& field, std::size_t i, double neighbor_radius,
                     double max_sq_edge, const Jitter& jitter) {
  if (field.size() != cloud.size()) invalid_input("tangent field must have one frame per point");
  if (i >= cloud.size()) invalid_input("star centre out of range");
  const RadiusIndex index(cloud, neighbor_radius);
  return star_from_neighbors(cloud, field, i, index.query(i, neighbor_radius), max_sq_edge, jitter);
}

std::vector<InconsistentSimplex> find_inconsistencies(const std::vector<Star>& stars) {
  std::map<Triangle, std::vector<std::size_t>> owners;
  for (std::size_t v = 0; v < stars.size(); ++v) {
    for (const Triangle& t : stars[v].triangles) owners[t].push_back(v);
  }
  std::vector<InconsistentSimplex> out;
  for (const auto& [t, who] : owners) {
    if (who.size() == 3) continue;
    InconsistentSimplex s;
    s.vertices = t;
    for (std::size_t v : t) {
      if (std::find(who.begin(), who.end(), v) == who.end()) s.missing_from.push_back(v);
    }
    out.push_back(std::move(s));
  }
  return out;
}

TdcResult build_tdc(const PointCloud& cloud, const TangentField& field, TdcParams params) {
  const std::size_t n = cloud.size();
  if (field.size() != n) invalid_input("tangent field must have one frame per point");
  if (cloud.intrinsic_dim() != 2 && field.k != 2) invalid_input("mesh reconstruction supports two-dimensional samples");
  if (n < 3) throw Error(ErrorCode::ReconstructionFailure, "need at least three points to reconstruct a mesh");
  if (params.max_sq_edge <= 0.0) {
    const double eps = estimate_resolution(cloud);
    params.max_sq_edge = 36.0 * eps * eps;
  }
  if (params.neighbor_radius <= 0.0) params.neighbor_radius = std::sqrt(params.max_sq_edge);
  if (params.perturb_radius < 0.0) params.perturb_radius = 0.01 * cloud_diameter(cloud);
  if (params.rounds < 0) invalid_input("repair rounds must be nonnegative");

  const RadiusIndex index(cloud, params.neighbor_radius);
  std::vector<std::vector<std::size_t>> nbrs(n);
  parallel_for(n, [&](std::size_t i) { nbrs[i] = index.query(i, params.neighbor_radius); });

  Jitter jitter(n);
  std::vector<Star> stars(n);
  auto rebuild = [&](const std::vector<std::size_t>& which) {
    parallel_for(which.size(), [&](std::size_t t) {
      const std::size_t i = which[t];
      stars[i] = star_from_neighbors(cloud, field, i, nbrs[i], params.max_sq_edge, jitter);
    });
  };
  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), std::size_t{0});
  rebuild(all);

  TdcResult result;
  std::vector<InconsistentSimplex> bad = find_inconsistencies(stars);
  result.report.initial_count = bad.size();
  std::mt19937_64 rng(params.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  int round = 0;
  for (; round < params.rounds && !bad.empty() && params.perturb_radius > 0.0; ++round) {
    std::vector<std::size_t> moved;
    for (const auto& s : bad) moved.insert(moved.end(), s.vertices.begin(), s.vertices.end());
    std::sort(moved.begin(), moved.end());
    moved.erase(std::unique(moved.begin(), moved.end()), moved.end());
    std::vector<char> affected(n, 0);
    for (std::size_t v : moved) {
      const double radius = params.perturb_radius * std::sqrt(unit(rng));
      const double angle = 2 * std::numbers::pi * unit(rng);
      if (field.usable[v] && field.frames[v].basis.cols() == 2) {
        jitter[v] = radius * (std::cos(angle) * field.frames[v].basis.col(0) + std::sin(angle) * field.frames[v].basis.col(1));
      }
      for (std::size_t w : nbrs[v]) affected[w] = 1;
    }
    std::vector<std::size_t> which;
    for (std::size_t v = 0; v < n; ++v) {
      if (affected[v]) which.push_back(v);
    }
    rebuild(which);
    bad = find_inconsistencies(stars);
  }
  result.report.rounds_used = round;
  result.report.final_count = bad.size();
  result.report.inconsistent = std::move(bad);
  for (std::size_t v = 0; v < n; ++v) {
    if (stars[v].status != StarStatus::Ok || stars[v].triangles.empty()) result.report.flagged_vertices.push_back(v);
  }

  std::vector<Triangle> faces;
  for (const Star& s : stars) faces.insert(faces.end(), s.triangles.begin(), s.triangles.end());
  std::sort(faces.begin(), faces.end());
  faces.erase(std::unique(faces.begin(), faces.end()), faces.end());
  if (faces.empty()) throw Error(ErrorCode::ReconstructionFailure, "every tangential star is empty");

  result.mesh.vertices = cloud.coords();
  result.mesh.faces.assign(faces.begin(), faces.end());
  result.mesh.source_index.resize(n);
  std::iota(result.mesh.source_index.begin(), result.mesh.source_index.end(), std::size_t{0});
  result.mesh.refresh_thickness();
  result.stars = std::move(stars);
  result.resolved = params;
  return result;
}

}  // namespace geodesy
