#pragma once

// Analytic test surfaces, their samplers and ground-truth intrinsic distances.

#include <cstdint>
#include <numbers>
#include <optional>
#include <string>

#include "geodesy/distance_matrix.hpp"
#include "geodesy/geometry.hpp"

namespace geodesy {

enum class SurfaceKind { Sphere, Torus, SwissRoll, FlatSquare, BumpedGrid };

struct SurfaceSpec {
  SurfaceKind kind = SurfaceKind::Sphere;
  double radius = 1.0;  // sphere
  double major_radius = 2.0;  // torus
  double minor_radius = 1.0;
  double u_min = std::numbers::pi / 4;  // swiss roll angle range and height
  double u_max = 9 * std::numbers::pi / 4;
  double height = 1.0;
  int k = 2;  // flat / bumped intrinsic dimension
  double amplitude = 1.0;  // bumped
  int grid = 3;  // bumped grid resolution m
  int ambient = 3;

  static SurfaceSpec sphere(double radius = 1.0);
  static SurfaceSpec torus(double major = 2.0, double minor = 1.0);
  static SurfaceSpec swiss_roll();
  static SurfaceSpec flat_square(int k = 2, int ambient = 3);
  /// [0,1]^k with the last coordinate bent by tri-cube bumps.
  static SurfaceSpec bumped_grid(int k, double amplitude, int m);

  int intrinsic_dim() const;
  int ambient_dim() const;
  /// eps = 1/(m-1) for the bumped grid.
  double grid_spacing() const;
  std::string name() const;
};

/// Parses "sphere", "torus", "swiss", "flat", "bumped".
SurfaceSpec parse_surface(const std::string& name);

enum class SamplingMode { ParamUniform, AreaUniform, RegularGrid };

SamplingMode parse_sampling_mode(const std::string& name);

/// n points on the surface, deterministic given the seed. RegularGrid is only valid for
/// FlatSquare / BumpedGrid and requires n to be a perfect k-th power.
PointCloud sample(const SurfaceSpec& spec, std::size_t n, std::uint64_t seed, SamplingMode mode);

/// Implicit-equation residual (0 on the surface).
double surface_residual(const SurfaceSpec& spec, const Vec& x);

/// Euclidean distance from x to the surface (numerical for the Swiss roll).
double distance_to_surface(const SurfaceSpec& spec, const Vec& x);

/// Nearest point on the surface. Supported for Sphere, Torus and FlatSquare.
Vec project_to_surface(const SurfaceSpec& spec, const Vec& x);

/// Tangent plane at an on-surface point. Supported for Sphere, Torus, SwissRoll and FlatSquare.
AffineSubspace analytic_tangent(const SurfaceSpec& spec, const Vec& x);

/// Isometric coordinates of an on-surface point (Swiss roll: (s, z); flat: the first k coordinates;
/// bumped grid: straightened coordinates). Throws InvalidInput for curved closed surfaces.
Vec isometric_coords(const SurfaceSpec& spec, const Vec& x);

/// Euclidean distance from an on-surface point to the surface boundary, measured in isometric
/// coordinates. +inf for closed surfaces.
double boundary_distance(const SurfaceSpec& spec, const Vec& x);

// Swiss roll arc length s(u) = (u/2) sqrt(1+u^2) + asinh(u)/2 and its inverse.
double swiss_arc_length(double u);
/// Newton inversion of swiss_arc_length to 1e-12.
double swiss_inverse_arc_length(double s);

enum class OracleMethod { ClosedForm, NewtonInversion, MidpointRefinement };

struct GroundTruthOracle {
  SurfaceSpec spec;
  OracleMethod method = OracleMethod::ClosedForm;
  double tolerance = 1e-8;  ///< relative length change that ends midpoint refinement
  int max_iters = 60;
  std::size_t max_segments = std::size_t{1} << 20;

  static GroundTruthOracle for_surface(const SurfaceSpec& spec);
};

struct RefinementResult {
  double length = 0.0;
  bool converged = false;
  int iterations = 0;
  Polyline path;
};

/// Midpoint refinement on the torus: each round bisects every segment in parameter space, then
/// minimizes the discrete path energy over the interior vertices by Gauss-Newton steps (endpoints
/// fixed), until the length change falls below the oracle tolerance. Other surfaces: InvalidInput.
RefinementResult refine_geodesic(const GroundTruthOracle& oracle, const Polyline& initial);

/// Intrinsic distance between two on-surface points. For the torus, `initial` seeds the refinement
/// (typically a neighbourhood-graph path); without it a straight line in parameter space is used.
/// Throws InvalidInput for off-surface points and ConvergenceFailure (carrying the best value in the
/// message) when refinement does not converge.
double true_distance(const GroundTruthOracle& oracle, const Vec& x, const Vec& y, const Polyline* initial = nullptr);

// --- Lower-bound construction ---

/// Tri-cube kernel w(t) = (1 - |t|^3)_+^3 and its derivative.
double tricube(double t);
double tricube_derivative(double t);

/// Arc length of t -> A (eps/2)^2 w(2t/eps - 1) over [0, eps], adaptive quadrature to 1e-10.
double bump_arc_length(double amplitude, double eps);

/// Height of the bumped curve gamma_eps at t in [0,1].
double bump_height(double amplitude, double eps, double t);
/// Arc length of gamma_eps over [0, t].
double bump_arc_length_to(double amplitude, double eps, double t);

struct LowerBoundPair {
  PointCloud cloud;  ///< m^k grid points in R^{k+1}
  DistanceMatrix d1;  ///< distances on the flat surface M1
  DistanceMatrix d2;  ///< distances on the bumped surface M2
  Embedding u1;
  Embedding u2;
  double eps = 0.0;
  double eta = 0.0;
  std::vector<std::vector<int>> grid_index;  ///< 0-based multi-index of each point
};

LowerBoundPair lower_bound_pair(int k, int m, double amplitude);

}  // namespace geodesy
