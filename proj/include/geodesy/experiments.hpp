#pragma once

// Experiment harness: graph versus mesh distance estimation, Isomap versus Mesh Isomap, and the
// lower-bound construction. Results are plain row structs plus CSV tables.

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "geodesy/embedding.hpp"
#include "geodesy/io.hpp"
#include "geodesy/surfaces.hpp"

namespace geodesy {

struct ExperimentConfig {
  SurfaceSpec surface = SurfaceSpec::sphere();
  SamplingMode mode = SamplingMode::AreaUniform;
  std::vector<std::size_t> sample_sizes{500, 1000, 2000};
  std::vector<double> radii{0.2, 0.3, 0.4, 0.5};
  int repeats = 1;
  std::size_t pair_subsample = 100;
  std::size_t landmarks = 30;
  /// Landmarks keep at least landmark_margin * eps_hat from the boundary along each isometric axis,
  /// capped at a quarter of that axis' extent.
  double landmark_margin = 3.0;
  std::uint64_t seed = 1;
  std::string output_dir;
  ReconstructionParams mesh;
  /// When false the wall_time column is written as 0.
  bool record_timing = true;

  /// Throws InvalidInput on repeats < 1, empty sample sizes or nonpositive radii.
  void validate() const;
};

/// Seed used for the sample of size n in the given repeat.
std::uint64_t repeat_seed(std::uint64_t base, std::size_t n, int repeat);

/// `count` distinct unordered pairs drawn uniformly from [0, m), in draw order with i < j.
/// Throws InvalidInput when count exceeds m(m-1)/2.
std::vector<std::pair<std::size_t, std::size_t>> sample_pairs(std::size_t m, std::size_t count, std::uint64_t seed);

struct DistanceRow {
  std::string surface;
  std::size_t n = 0;
  std::size_t vertices = 0;  ///< mesh vertex count (net points with usable frames)
  std::string method;        ///< "graph" or "mesh"
  double radius = 0.0;       ///< graph radius; NaN for the mesh
  int repeat = 0;
  std::size_t pairs = 0;
  double mean_abs_error = 0.0;
  double mean_rel_error = 0.0;
  double eps_hat = 0.0;
  double wall_time = 0.0;
  std::string status = "ok";

  bool ok() const { return status == "ok"; }
};

struct DistanceExperiment {
  std::vector<DistanceRow> rows;  ///< sorted by (n, repeat, method, radius)
  CsvTable table() const;
};

/// For each (n, repeat): sample, estimate eps_hat, reconstruct the mesh on a net, draw the pair
/// subsample among mesh vertices, then compare graph distances on the full sample (one row per
/// radius) and exact mesh distances (one row) against the ground-truth oracle. Stage failures are
/// recorded in the status column and the run continues.
DistanceExperiment run_distance_experiment(const ExperimentConfig& cfg);

struct IsomapRow {
  std::string surface;
  std::size_t n = 0;
  std::size_t vertices = 0;
  std::string method;   ///< "isomap" or "mesh_isomap"
  double radius = 0.0;  ///< NaN for Mesh Isomap
  int repeat = 0;
  std::size_t landmarks = 0;
  double rmse = 0.0;
  double eps_hat = 0.0;
  double wall_time = 0.0;
  std::string status = "ok";

  bool ok() const { return status == "ok"; }
};

struct IsomapExperiment {
  std::vector<IsomapRow> rows;
  CsvTable table() const;
};

/// Interior mesh vertices eligible as landmarks (cloud indices), per the margin rule of the config.
std::vector<std::size_t> interior_candidates(const ExperimentConfig& cfg, const PointCloud& cloud,
                                             const std::vector<std::size_t>& vertices, double eps_hat);

/// Per repeat: graph Isomap on the full sample for each radius and Mesh Isomap once, both on the
/// same interior landmarks, scored by Procrustes rmse against the isometric coordinates.
IsomapExperiment run_isomap_experiment(const ExperimentConfig& cfg);

struct LowerBoundRow {
  int k = 1;
  int m = 0;
  double eps = 0.0;
  double eta = 0.0;
  double c1 = 0.0;                ///< A^2 / 16 * integral of w'^2
  double ratio_min = 0.0;         ///< (d2 - d1) / (eps^2 d1) over pairs that differ in the last index
  double ratio_median = 0.0;
  double beta_ratio_min = 0.0;    ///< the same divided by beta^2
  double beta_ratio_median = 0.0;
  double beta_identity_error = 0.0;  ///< max |(d2^2 - d1^2) / (d1^2 ((eta/eps)^2 - 1)) - beta^2|
  double axis_gap_max = 0.0;      ///< max |d2 - d1| over pairs with equal last index
  double embedding_gap = 0.0;     ///< rms |u1 - u2|
  double gap_ratio = 0.0;         ///< embedding_gap / eps^2
};

struct LowerBoundExperiment {
  std::vector<LowerBoundRow> rows;
  CsvTable table() const;
};

/// A^2 / 16 times the integral of w'(t)^2 over [-1, 1].
double bump_constant(double amplitude);

LowerBoundExperiment run_lower_bound_experiment(int k, const std::vector<int>& m_list, double amplitude);

/// Least-squares slope of log(y) on log(x) over the entries with both positive and finite.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace geodesy
