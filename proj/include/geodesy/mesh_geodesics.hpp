#pragma once

// Shortest paths on triangle meshes: exact window propagation and a Steiner-point graph oracle.

#include <cstddef>
#include <memory>
#include <utility>
#include <vector>

#include "geodesy/distance_matrix.hpp"
#include "geodesy/mesh.hpp"

namespace geodesy {

struct GeodesicSolution {
  std::size_t source = 0;
  std::vector<double> distance;  ///< per vertex; +inf when unreachable
  std::size_t windows_created = 0;

  // Backtracking data, filled by the exact solver unless paths were disabled.
  struct Window {
    std::size_t half_edge;
    double b0, b1, sx, sy, sigma;
    std::ptrdiff_t parent_window;  ///< -1 when the window starts at a vertex
    std::size_t parent_vertex;
  };
  enum class Via { None, Source, Vertex, Window };
  struct VertexRecord {
    Via via = Via::None;
    std::size_t index = 0;  ///< predecessor vertex or window
    int corner = 0;         ///< 0 = edge origin, 1 = edge target, 2 = opposite vertex of the window's face
  };
  std::vector<Window> windows;
  std::vector<VertexRecord> records;
};

/// Precomputed propagation structure for one mesh. Refuses meshes with edges in three or more
/// faces or without a consistent orientation (ErrorCode::NonManifold).
class ExactGeodesicSolver {
 public:
  explicit ExactGeodesicSolver(const TriMesh& mesh);
  ~ExactGeodesicSolver();
  ExactGeodesicSolver(ExactGeodesicSolver&&) noexcept;
  ExactGeodesicSolver& operator=(ExactGeodesicSolver&&) noexcept;

  /// Distances from `source`. When `targets` is given, propagation stops once they are final
  /// (other vertices may then hold upper bounds).
  GeodesicSolution solve(std::size_t source, const std::vector<std::size_t>* targets = nullptr,
                         bool keep_paths = true) const;

  /// Shortest path to `target` crossing face interiors; requires a solution with paths kept.
  Polyline path(const GeodesicSolution& solution, std::size_t target) const;

  std::size_t vertex_count() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

GeodesicSolution exact_geodesics(const TriMesh& mesh, std::size_t source);

/// Dijkstra over vertices plus m evenly spaced points per edge, linking nodes that share a face.
GeodesicSolution steiner_geodesics(const TriMesh& mesh, std::size_t source, std::size_t subdivisions);

/// Exact distances for the given vertex pairs, one propagation per distinct first index.
DistanceMatrix mesh_distance_matrix(const TriMesh& mesh, const std::vector<std::pair<std::size_t, std::size_t>>& pairs);
DistanceMatrix mesh_distance_matrix(const ExactGeodesicSolver& solver,
                                    const std::vector<std::pair<std::size_t, std::size_t>>& pairs);

}  // namespace geodesy
