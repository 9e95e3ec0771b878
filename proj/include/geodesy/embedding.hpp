#pragma once

// Classical Scaling, Procrustes alignment, and the graph / mesh Isomap pipelines.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "geodesy/distance_matrix.hpp"
#include "geodesy/graph.hpp"
#include "geodesy/mesh.hpp"
#include "geodesy/tdc.hpp"

namespace geodesy {

struct ScalingResult {
  Embedding embedding;
  Vec eigenvalues;             ///< top-k eigenvalues of the centred Gram matrix, descending
  double clamped_mass = 0.0;   ///< sum of |lambda| over negative top-k eigenvalues set to zero
  std::size_t clamped = 0;
  std::vector<std::string> warnings;
};

/// Embeds a complete distance matrix in R^k via the top-k eigenpairs of -J D^2 J / 2.
ScalingResult classical_scaling(const DistanceMatrix& d, int k);

struct ProcrustesResult {
  Mat rotation;      ///< k x k orthogonal, reflections allowed
  Vec translation;   ///< v ~ rotation * u + translation
  double rmse = 0.0;
};

/// Best orthogonal-plus-translation alignment of u onto v.
ProcrustesResult procrustes_align(const Mat& u, const Mat& v);
ProcrustesResult procrustes_align(const Embedding& u, const Embedding& v);

/// rmse of v against rotation * u + translation.
double alignment_rmse(const Mat& u, const Mat& v, const Mat& rotation, const Vec& translation);

struct WidthDiameter {
  double width = 0.0;
  double diameter = 0.0;
};

WidthDiameter width_and_diameter(const Mat& points);

/// Graph Isomap. With `landmarks`, only the landmark block of the distance matrix is computed and
/// the embedding has one row per landmark. Throws Disconnected when a needed pair is unreachable.
Embedding isomap(const PointCloud& cloud, int k, double r, const std::vector<std::size_t>* landmarks = nullptr);

struct ReconstructionParams {
  double tangent_scale = 2.0;       ///< h = tangent_scale * eps_hat
  double net_scale = 0.5;           ///< net radius = net_scale * eps_hat; <= 0 keeps every point
  double max_edge_scale = 4.0;      ///< max_sq_edge = (max_edge_scale * eps_hat)^2
  double perturb_radius = -1.0;     ///< < 0: 0.01 x diameter
  int repair_rounds = 50;
  std::uint64_t seed = 1;
};

struct Reconstruction {
  double eps_hat = 0.0;
  std::vector<std::size_t> vertices;  ///< cloud index of each mesh vertex
  TangentField field;
  TdcResult tdc;
  MeshReport report;
  ReconstructionParams params;
};

/// Net extraction, tangent estimation and the tangential Delaunay complex.
Reconstruction reconstruct(const PointCloud& cloud, const ReconstructionParams& params = {});

struct MeshIsomapResult {
  Embedding embedding;
  Reconstruction reconstruction;
  std::vector<std::size_t> embedded;  ///< cloud index of each embedding row
};

/// Mesh Isomap: reconstruct, exact mesh distances between the embedded points, Classical Scaling.
/// `landmarks` are cloud indices and must be mesh vertices; without them every mesh vertex is embedded.
/// Throws ReconstructionFailure (non-manifold mesh) or Disconnected.
MeshIsomapResult mesh_isomap(const PointCloud& cloud, int k, const ReconstructionParams& params = {},
                             const std::vector<std::size_t>* landmarks = nullptr);
/// Mesh Isomap on an existing reconstruction.
MeshIsomapResult mesh_isomap(Reconstruction reconstruction, int k, const std::vector<std::size_t>* landmarks = nullptr);

}  // namespace geodesy
