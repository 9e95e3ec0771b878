#pragma once

// Independent reference computations used by the unit and acceptance tests.

#include <cstddef>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "geodesy/graph.hpp"
#include "geodesy/mesh.hpp"
#include "geodesy/point_cloud.hpp"

namespace oracle {

using geodesy::Mat;
using geodesy::Vec;

/// Single-source shortest paths by Bellman-Ford relaxation over an undirected edge list.
std::vector<double> bellman_ford(std::size_t n, const std::vector<std::pair<std::pair<std::size_t, std::size_t>, double>>& edges,
                                 std::size_t source);

/// Shortest vertex-to-vertex distance on a convex polyhedral mesh by exhaustive enumeration of
/// edge-adjacent face sequences, unfolded into the plane.
double unfolding_distance(const geodesy::TriMesh& mesh, std::size_t s, std::size_t t);

/// Surface of the unit cube [0,1]^3, each face split into m x m squares and 2 m^2 triangles.
geodesy::TriMesh cube_mesh(int m);

/// Planar triangulated grid of (m+1)^2 vertices on [0,1]^2 x {0}.
geodesy::TriMesh flat_grid_mesh(int m);

/// Smallest pairwise distance among the selected points (brute force).
double min_pairwise_distance(const geodesy::PointCloud& cloud, const std::vector<std::size_t>& selected);

/// Largest distance from a cloud point to its nearest selected point (brute force).
double cover_radius(const geodesy::PointCloud& cloud, const std::vector<std::size_t>& selected);

/// Uniformly random orthogonal d x d matrix (QR of a Gaussian matrix with sign correction).
Mat random_orthogonal(int d, std::mt19937_64& rng);

/// Integral of w'(t)^2 over [-1, 1] for the tri-cube kernel, via the Beta function: 54 B(5/3, 5).
double tricube_derivative_energy();

/// Swiss roll arc length from 0 to u by composite Simpson quadrature of sqrt(1 + t^2).
double swiss_arc_length_simpson(double u, int panels = 20000);

/// Sphere geodesic through the arccosine of the normalized inner product.
double sphere_arccos(const Vec& x, const Vec& y, double radius = 1.0);

/// Ordinary least-squares slope of y on x.
double ols_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace oracle
