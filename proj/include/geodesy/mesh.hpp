#pragma once

// Triangle meshes: storage, half-edge adjacency, validation and OFF serialization.

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "geodesy/surfaces.hpp"

namespace geodesy {

using Face = std::array<std::size_t, 3>;

struct TriMesh {
  Mat vertices;                           ///< n x d
  std::vector<Face> faces;
  std::vector<std::size_t> source_index;  ///< index of each vertex in the cloud it was built from
  std::vector<double> face_thickness;     ///< filled by refresh_thickness()

  std::size_t vertex_count() const { return static_cast<std::size_t>(vertices.rows()); }
  std::size_t face_count() const { return faces.size(); }
  int ambient_dim() const { return static_cast<int>(vertices.cols()); }
  Vec vertex(std::size_t i) const { return vertices.row(static_cast<Eigen::Index>(i)).transpose(); }
  Simplex face_simplex(std::size_t f) const;
  void refresh_thickness();
};

/// Half-edge h = 3f + c runs from faces[f][c] to faces[f][(c+1)%3]; twin[h] < 0 on boundary edges.
/// Faces are re-oriented consistently per component when the mesh is orientable.
struct HalfEdgeMesh {
  static constexpr std::ptrdiff_t kNone = -1;

  std::vector<Face> faces;
  std::vector<std::ptrdiff_t> twin;
  std::vector<std::vector<std::size_t>> vertex_faces;
  std::vector<std::pair<std::size_t, std::size_t>> non_manifold_edges;
  std::size_t edge_count = 0;
  std::size_t boundary_edge_count = 0;
  bool manifold = true;  ///< every edge in at most two faces
  bool oriented = true;  ///< a consistent orientation was found

  static std::size_t face_of(std::size_t h) { return h / 3; }
  static std::size_t next(std::size_t h) { return 3 * (h / 3) + (h % 3 + 1) % 3; }
  static std::size_t prev(std::size_t h) { return 3 * (h / 3) + (h % 3 + 2) % 3; }
  std::size_t origin(std::size_t h) const { return faces[h / 3][h % 3]; }
  std::size_t target(std::size_t h) const { return faces[h / 3][(h % 3 + 1) % 3]; }
  std::size_t half_edge_count() const { return 3 * faces.size(); }
};

HalfEdgeMesh build_half_edges(const TriMesh& mesh);

struct MeshReport {
  std::size_t vertices = 0;
  std::size_t edges = 0;
  std::size_t faces = 0;
  long euler_characteristic = 0;
  std::size_t isolated_vertices = 0;
  std::size_t components = 0;  ///< connected components of the face graph
  double min_thickness = 0.0;
  double max_diameter = 0.0;
  std::size_t boundary_edges = 0;
  std::size_t non_manifold_edges = 0;
  std::size_t non_manifold_vertices = 0;  ///< vertices whose link is not a single fan
  std::size_t duplicate_faces = 0;
  std::size_t degenerate_faces = 0;
  bool oriented = false;
  bool manifold = false;  ///< no non-manifold edges, vertices or duplicate faces
  bool closed = false;    ///< manifold without boundary edges
  std::optional<double> hausdorff_mesh_to_surface;
  std::optional<double> hausdorff_surface_to_mesh;

  std::string summary() const;
};

/// Topological and quality report; with a surface spec, adds one-sided Hausdorff estimates from
/// `probes` random points on each side.
MeshReport validate_mesh(const TriMesh& mesh, const std::optional<SurfaceSpec>& spec = std::nullopt,
                         std::size_t probes = 10000, std::uint64_t seed = 7);

/// Distance from x to the triangle (a, b, c) in any ambient dimension.
double point_triangle_distance(const Vec& x, const Vec& a, const Vec& b, const Vec& c);

void write_off(std::ostream& out, const TriMesh& mesh);
TriMesh read_off(std::istream& in);
void save_off(const std::string& path, const TriMesh& mesh);
TriMesh load_off(const std::string& path);

}  // namespace geodesy
