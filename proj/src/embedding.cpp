#include "geodesy/embedding.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

#include "geodesy/error.hpp"
#include "geodesy/mesh_geodesics.hpp"
#include "geodesy/nets.hpp"

namespace geodesy {

ScalingResult classical_scaling(const DistanceMatrix& d, int k) {
  const std::size_t n = d.size();
  if (k < 1) invalid_input("embedding dimension must be positive");
  if (static_cast<std::size_t>(k) >= n) invalid_input("embedding dimension must be smaller than the point count");
  const Mat dense = d.to_dense();
  if (!dense.allFinite()) invalid_input("distance matrix has infinite entries");
  const auto ni = static_cast<Eigen::Index>(n);
  const Mat sq = dense.array().square().matrix();
  const Vec row_mean = sq.rowwise().mean();
  const double total_mean = row_mean.mean();
  Mat gram(ni, ni);
  for (Eigen::Index i = 0; i < ni; ++i) {
    for (Eigen::Index j = 0; j < ni; ++j) gram(i, j) = -0.5 * (sq(i, j) - row_mean(i) - row_mean(j) + total_mean);
  }
  const Eigen::SelfAdjointEigenSolver<Mat> eig(gram);
  ScalingResult out;
  out.embedding.coords = Mat::Zero(ni, k);
  out.embedding.method = "classical_scaling";
  out.embedding.parameters = "k=" + std::to_string(k);
  out.eigenvalues.resize(k);
  std::size_t nonpositive = 0;
  for (int c = 0; c < k; ++c) {
    const Eigen::Index col = ni - 1 - c;
    const double lambda = eig.eigenvalues()(col);
    out.eigenvalues(c) = lambda;
    if (!(lambda > 0.0)) {
      ++nonpositive;
      if (lambda < 0.0) {
        out.clamped_mass += -lambda;
        ++out.clamped;
      }
      continue;
    }
    Vec v = eig.eigenvectors().col(col);
    Eigen::Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    if (v(arg) < 0.0) v = -v;
    out.embedding.coords.col(c) = std::sqrt(lambda) * v;
  }
  if (out.clamped > 0) {
    std::ostringstream msg;
    msg << out.clamped << " negative eigenvalue(s) clamped to zero, mass " << out.clamped_mass;
    out.warnings.push_back(msg.str());
  }
  if (nonpositive > 0 && dense.maxCoeff() > 0.0) {
    out.warnings.push_back("fewer than k positive eigenvalues; trailing coordinates are zero");
  }
  return out;
}

ProcrustesResult procrustes_align(const Mat& u, const Mat& v) {
  if (u.rows() != v.rows() || u.cols() != v.cols()) invalid_input("Procrustes inputs must have the same shape");
  if (u.rows() == 0) invalid_input("Procrustes needs at least one point");
  const Vec ubar = u.colwise().mean().transpose();
  const Vec vbar = v.colwise().mean().transpose();
  const Mat u0 = u.rowwise() - ubar.transpose();
  const Mat v0 = v.rowwise() - vbar.transpose();
  const Mat m = v0.transpose() * u0;
  const Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  ProcrustesResult out;
  out.rotation = svd.matrixU() * svd.matrixV().transpose();
  out.translation = vbar - out.rotation * ubar;
  out.rmse = alignment_rmse(u, v, out.rotation, out.translation);
  return out;
}

ProcrustesResult procrustes_align(const Embedding& u, const Embedding& v) { return procrustes_align(u.coords, v.coords); }

double alignment_rmse(const Mat& u, const Mat& v, const Mat& rotation, const Vec& translation) {
  const Mat moved = (u * rotation.transpose()).rowwise() + translation.transpose();
  return std::sqrt((v - moved).squaredNorm() / static_cast<double>(u.rows()));
}

WidthDiameter width_and_diameter(const Mat& points) {
  const Eigen::Index n = points.rows();
  if (n < points.cols() + 1) invalid_input("width needs at least k+1 points");
  WidthDiameter out;
  const Mat centred = points.rowwise() - points.colwise().mean();
  const Mat cov = centred.transpose() * centred / static_cast<double>(n);
  const Eigen::SelfAdjointEigenSolver<Mat> eig(cov);
  out.width = 2.0 * std::sqrt(std::max(0.0, eig.eigenvalues()(0)));
  double best = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) best = std::max(best, (points.row(i) - points.row(j)).squaredNorm());
  }
  out.diameter = std::sqrt(best);
  return out;
}

namespace {

std::string component_summary(const NeighborhoodGraph& g, const std::vector<std::size_t>& points) {
  std::map<std::size_t, std::size_t> counts;
  for (std::size_t p : points) ++counts[g.component[p]];
  std::ostringstream s;
  s << "neighbourhood graph at radius " << g.radius << " splits the points into " << counts.size() << " components (sizes";
  for (const auto& [label, size] : counts) s << ' ' << size;
  s << ")";
  return s.str();
}

}  // namespace

Embedding isomap(const PointCloud& cloud, int k, double r, const std::vector<std::size_t>* landmarks) {
  const NeighborhoodGraph g = build_graph(cloud, r);
  std::vector<std::size_t> points;
  if (landmarks != nullptr) {
    points = *landmarks;
  } else {
    points.resize(cloud.size());
    std::iota(points.begin(), points.end(), std::size_t{0});
  }
  for (std::size_t p : points) {
    if (p >= cloud.size()) invalid_input("landmark index out of range");
  }
  for (std::size_t p : points) {
    if (g.component[p] != g.component[points.front()]) throw Error(ErrorCode::Disconnected, component_summary(g, points));
  }
  const auto rows = graph_distances(g, points);
  DistanceMatrix d(points.size());
  for (std::size_t a = 0; a < points.size(); ++a) {
    for (std::size_t b = a + 1; b < points.size(); ++b) d.set(a, b, 0.5 * (rows[a][points[b]] + rows[b][points[a]]));
  }
  Embedding e = classical_scaling(d, k).embedding;
  e.method = "isomap";
  e.parameters = "k=" + std::to_string(k) + " r=" + std::to_string(r);
  return e;
}

Reconstruction reconstruct(const PointCloud& cloud, const ReconstructionParams& params) {
  Reconstruction rec;
  rec.params = params;
  rec.eps_hat = estimate_resolution(cloud);
  std::vector<std::size_t> net;
  if (params.net_scale > 0.0) {
    net = extract_net_plain(cloud, params.net_scale * rec.eps_hat).selected;
  } else {
    net.resize(cloud.size());
    std::iota(net.begin(), net.end(), std::size_t{0});
  }
  std::sort(net.begin(), net.end());
  const TangentField all = estimate_tangents_at(cloud, net, 2, params.tangent_scale * rec.eps_hat);
  TangentField& kept = rec.field;
  kept.radius_h = all.radius_h;
  kept.k = all.k;
  for (std::size_t t = 0; t < all.size(); ++t) {
    if (!all.usable[t]) continue;
    rec.vertices.push_back(net[t]);
    kept.frames.push_back(all.frames[t]);
    kept.points.push_back(all.points[t]);
    kept.neighbor_counts.push_back(all.neighbor_counts[t]);
    kept.gap_ratio.push_back(all.gap_ratio[t]);
    kept.usable.push_back(1);
    kept.degenerate_gap.push_back(all.degenerate_gap[t]);
  }
  const PointCloud sub = cloud.subset(rec.vertices);
  TdcParams tp;
  tp.max_sq_edge = std::pow(params.max_edge_scale * rec.eps_hat, 2);
  tp.perturb_radius = params.perturb_radius;
  tp.rounds = params.repair_rounds;
  tp.seed = params.seed;
  rec.tdc = build_tdc(sub, kept, tp);
  rec.tdc.mesh.source_index = rec.vertices;
  rec.report = validate_mesh(rec.tdc.mesh, std::nullopt, 0);
  return rec;
}

MeshIsomapResult mesh_isomap(const PointCloud& cloud, int k, const ReconstructionParams& params,
                             const std::vector<std::size_t>* landmarks) {
  return mesh_isomap(reconstruct(cloud, params), k, landmarks);
}

MeshIsomapResult mesh_isomap(Reconstruction reconstruction, int k, const std::vector<std::size_t>* landmarks) {
  MeshIsomapResult out;
  out.reconstruction = std::move(reconstruction);
  const Reconstruction& rec = out.reconstruction;
  if (!rec.report.manifold) {
    throw Error(ErrorCode::ReconstructionFailure, "reconstructed mesh is not manifold: " + rec.report.summary());
  }
  std::map<std::size_t, std::size_t> vertex_of;
  for (std::size_t v = 0; v < rec.vertices.size(); ++v) vertex_of[rec.vertices[v]] = v;
  std::vector<std::size_t> chosen;
  if (landmarks != nullptr) {
    for (std::size_t p : *landmarks) {
      auto it = vertex_of.find(p);
      if (it == vertex_of.end()) invalid_input("landmark " + std::to_string(p) + " is not a mesh vertex");
      chosen.push_back(it->second);
    }
  } else {
    for (std::size_t v = 0; v < rec.vertices.size(); ++v) chosen.push_back(v);
  }
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t a = 0; a < chosen.size(); ++a) {
    for (std::size_t b = a + 1; b < chosen.size(); ++b) pairs.emplace_back(chosen[a], chosen[b]);
  }
  const ExactGeodesicSolver solver(rec.tdc.mesh);
  const DistanceMatrix full = mesh_distance_matrix(solver, pairs);
  const DistanceMatrix d = full.submatrix(chosen);
  for (std::size_t a = 0; a < chosen.size(); ++a) {
    for (std::size_t b = a + 1; b < chosen.size(); ++b) {
      if (!std::isfinite(d.at(a, b))) throw Error(ErrorCode::Disconnected, "reconstructed mesh is disconnected between embedded points");
    }
  }
  out.embedding = classical_scaling(d, k).embedding;
  out.embedding.method = "mesh_isomap";
  out.embedding.parameters = "k=" + std::to_string(k) + " tangent_scale=" + std::to_string(rec.params.tangent_scale);
  for (std::size_t v : chosen) out.embedded.push_back(rec.vertices[v]);
  return out;
}

}  // namespace geodesy
