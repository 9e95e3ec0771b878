#pragma once

// Tangential Delaunay complex for two-dimensional samples.

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "geodesy/mesh.hpp"
#include "geodesy/tangents.hpp"

namespace geodesy {

/// Vertex triple in ascending order.
using Triangle = std::array<std::size_t, 3>;

enum class StarStatus { Ok, TooFewNeighbors, Collinear, UnusableFrame };

struct Star {
  std::vector<Triangle> triangles;  ///< each contains the centre vertex
  StarStatus status = StarStatus::Ok;
};

/// Per-vertex displacements applied before projecting into the tangent charts (empty = none).
using Jitter = std::vector<Vec>;

/// Delaunay star of point i computed in its tangent frame: neighbours within `neighbor_radius`
/// are projected to the frame with weight minus their squared offset from it, so a triangle is kept
/// exactly when some ball centred on the frame passes through its vertices and contains no other
/// neighbour. Triangles with an edge whose squared length exceeds `max_sq_edge` are dropped. Ties are
/// broken by index-ordered symbolic perturbation.
Star tangential_star(const PointCloud& cloud, const TangentField& field, std::size_t i, double neighbor_radius,
                     double max_sq_edge, const Jitter& jitter = {});

struct TdcParams {
  double neighbor_radius = 0.0;  ///< <= 0: sqrt(max_sq_edge)
  double max_sq_edge = 0.0;      ///< <= 0: (6 eps_hat)^2
  double perturb_radius = -1.0;  ///< < 0: 0.01 x cloud diameter
  int rounds = 50;
  std::uint64_t seed = 1;
};

struct InconsistentSimplex {
  Triangle vertices{};
  std::vector<std::size_t> missing_from;  ///< vertices whose stars omit the triangle
};

struct InconsistencyReport {
  std::vector<InconsistentSimplex> inconsistent;
  std::size_t initial_count = 0;
  std::size_t final_count = 0;
  int rounds_used = 0;
  std::vector<std::size_t> flagged_vertices;  ///< vertices with an empty or failed star
};

struct TdcResult {
  TriMesh mesh;
  InconsistencyReport report;
  std::vector<Star> stars;
  TdcParams resolved;  ///< parameters after defaults were filled in
};

/// Union of all tangential stars with the perturbation repair loop. `field` must hold one frame per
/// cloud point. Throws ReconstructionFailure when every star is empty.
TdcResult build_tdc(const PointCloud& cloud, const TangentField& field, TdcParams params = {});

/// Triangles failing the all-stars test.
std::vector<InconsistentSimplex> find_inconsistencies(const std::vector<Star>& stars);

}  // namespace geodesy
