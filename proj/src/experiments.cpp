#include "geodesy/experiments.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <set>

#include "geodesy/error.hpp"
#include "geodesy/graph.hpp"
#include "geodesy/mesh_geodesics.hpp"
#include "geodesy/nets.hpp"
#include "geodesy/parallel.hpp"

namespace geodesy {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count(); }

 private:
  std::chrono::steady_clock::time_point start_;
};

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double median_of(std::vector<double> v) {
  if (v.empty()) return kNaN;
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  const double hi = v[mid];
  if (v.size() % 2 == 1) return hi;
  return 0.5 * (hi + *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid)));
}

struct Jobs {
  std::vector<std::pair<std::size_t, int>> list;
  explicit Jobs(const ExperimentConfig& cfg) {
    for (std::size_t n : cfg.sample_sizes) {
      for (int r = 0; r < cfg.repeats; ++r) list.emplace_back(n, r);
    }
  }
};

struct ErrorStats {
  double mean_abs = kNaN;
  double mean_rel = kNaN;
  bool finite = true;
};

ErrorStats score(const std::vector<double>& estimate, const std::vector<double>& truth) {
  ErrorStats st;
  double abs_sum = 0.0, rel_sum = 0.0;
  std::size_t used = 0;
  for (std::size_t p = 0; p < truth.size(); ++p) {
    if (!std::isfinite(truth[p])) continue;
    if (!std::isfinite(estimate[p])) {
      st.finite = false;
      return st;
    }
    const double e = std::abs(estimate[p] - truth[p]);
    abs_sum += e;
    rel_sum += e / truth[p];
    ++used;
  }
  if (used > 0) {
    st.mean_abs = abs_sum / static_cast<double>(used);
    st.mean_rel = rel_sum / static_cast<double>(used);
  }
  return st;
}

std::string cell(double x) { return format_double(x); }
std::string cell(std::size_t x) { return std::to_string(x); }
std::string cell(int x) { return std::to_string(x); }

std::vector<std::size_t> net_vertices(const PointCloud& cloud, const ReconstructionParams& params, double eps) {
  std::vector<std::size_t> v;
  if (params.net_scale > 0.0) {
    v = extract_net_plain(cloud, params.net_scale * eps).selected;
  } else {
    v.resize(cloud.size());
    std::iota(v.begin(), v.end(), std::size_t{0});
  }
  std::sort(v.begin(), v.end());
  return v;
}

std::vector<DistanceRow> distance_repeat(const ExperimentConfig& cfg, std::size_t n, int repeat) {
  const std::uint64_t seed = repeat_seed(cfg.seed, n, repeat);
  const PointCloud cloud = sample(cfg.surface, n, seed, cfg.mode);
  const double eps = estimate_resolution(cloud);

  DistanceRow base;
  base.surface = cfg.surface.name();
  base.n = n;
  base.repeat = repeat;
  base.eps_hat = eps;

  Stopwatch mesh_clock;
  std::optional<Reconstruction> rec;
  std::string mesh_status = "ok";
  try {
    rec = reconstruct(cloud, cfg.mesh);
    if (!rec->report.manifold) mesh_status = "non_manifold";
  } catch (const Error& e) {
    mesh_status = error_code_name(e.code());
  }
  double mesh_time = mesh_clock.seconds();
  const std::vector<std::size_t> vertices = rec ? rec->vertices : net_vertices(cloud, cfg.mesh, eps);
  base.vertices = vertices.size();

  std::vector<std::pair<std::size_t, std::size_t>> local;
  try {
    local = sample_pairs(vertices.size(), cfg.pair_subsample, splitmix(seed ^ 0x5041495253ULL));
  } catch (const Error& e) {
    std::vector<DistanceRow> rows;
    DistanceRow row = base;
    row.method = "mesh";
    row.radius = kNaN;
    row.status = error_code_name(e.code());
    rows.push_back(row);
    return rows;
  }
  std::vector<std::pair<std::size_t, std::size_t>> global(local.size());
  for (std::size_t p = 0; p < local.size(); ++p) global[p] = {vertices[local[p].first], vertices[local[p].second]};

  const GroundTruthOracle oracle = GroundTruthOracle::for_surface(cfg.surface);
  std::optional<NeighborhoodGraph> seed_graph;
  if (oracle.method == OracleMethod::MidpointRefinement) seed_graph = build_graph(cloud, 2.0 * eps);
  std::vector<double> truth(global.size(), kNaN);
  parallel_for(global.size(), [&](std::size_t p) {
    const auto [i, j] = global[p];
    std::optional<Polyline> start;
    if (seed_graph && seed_graph->component[i] == seed_graph->component[j]) start = graph_path(*seed_graph, cloud, i, j);
    try {
      truth[p] = true_distance(oracle, cloud.point(i), cloud.point(j), start ? &*start : nullptr);
    } catch (const Error&) {
      truth[p] = kNaN;
    }
  });
  const auto valid = static_cast<std::size_t>(std::count_if(truth.begin(), truth.end(), [](double t) { return std::isfinite(t); }));
  base.pairs = valid;

  std::vector<std::size_t> sources;
  for (const auto& pr : global) sources.push_back(pr.first);
  std::sort(sources.begin(), sources.end());
  sources.erase(std::unique(sources.begin(), sources.end()), sources.end());

  std::vector<DistanceRow> rows;
  for (double r : cfg.radii) {
    Stopwatch clock;
    DistanceRow row = base;
    row.method = "graph";
    row.radius = r;
    const NeighborhoodGraph g = build_graph(cloud, r);
    const auto dist = graph_distances(g, sources);
    std::vector<double> est(global.size());
    for (std::size_t p = 0; p < global.size(); ++p) {
      const auto at = std::lower_bound(sources.begin(), sources.end(), global[p].first) - sources.begin();
      est[p] = dist[static_cast<std::size_t>(at)][global[p].second];
    }
    const ErrorStats st = score(est, truth);
    row.mean_abs_error = st.mean_abs;
    row.mean_rel_error = st.mean_rel;
    if (!st.finite) row.status = "disconnected";
    row.wall_time = cfg.record_timing ? clock.seconds() : 0.0;
    rows.push_back(row);
  }

  DistanceRow mesh_row = base;
  mesh_row.method = "mesh";
  mesh_row.radius = kNaN;
  mesh_row.status = mesh_status;
  mesh_row.mean_abs_error = kNaN;
  mesh_row.mean_rel_error = kNaN;
  if (mesh_status == "ok") {
    Stopwatch clock;
    try {
      const ExactGeodesicSolver solver(rec->tdc.mesh);
      const DistanceMatrix dm = mesh_distance_matrix(solver, local);
      std::vector<double> est(local.size());
      for (std::size_t p = 0; p < local.size(); ++p) est[p] = dm.at(local[p].first, local[p].second);
      const ErrorStats st = score(est, truth);
      mesh_row.mean_abs_error = st.mean_abs;
      mesh_row.mean_rel_error = st.mean_rel;
      if (!st.finite) mesh_row.status = "disconnected";
    } catch (const Error& e) {
      mesh_row.status = error_code_name(e.code());
    }
    mesh_time += clock.seconds();
  }
  mesh_row.wall_time = cfg.record_timing ? mesh_time : 0.0;
  rows.push_back(mesh_row);
  return rows;
}

struct AxisBox {
  std::vector<double> lo, hi;
};

AxisBox isometric_box(const SurfaceSpec& spec) {
  AxisBox box;
  switch (spec.kind) {
    case SurfaceKind::SwissRoll:
      box.lo = {swiss_arc_length(spec.u_min), 0.0};
      box.hi = {swiss_arc_length(spec.u_max), spec.height};
      return box;
    case SurfaceKind::FlatSquare:
      box.lo.assign(static_cast<std::size_t>(spec.k), 0.0);
      box.hi.assign(static_cast<std::size_t>(spec.k), 1.0);
      return box;
    default:
      invalid_input("the Isomap experiment needs a surface with global isometric coordinates (swiss or flat)");
  }
}

std::vector<IsomapRow> isomap_repeat(const ExperimentConfig& cfg, std::size_t n, int repeat) {
  const std::uint64_t seed = repeat_seed(cfg.seed, n, repeat);
  const PointCloud cloud = sample(cfg.surface, n, seed, cfg.mode);
  const double eps = estimate_resolution(cloud);
  const int k = cfg.surface.intrinsic_dim();

  IsomapRow base;
  base.surface = cfg.surface.name();
  base.n = n;
  base.repeat = repeat;
  base.eps_hat = eps;

  Stopwatch mesh_clock;
  std::optional<Reconstruction> rec;
  std::string mesh_status = "ok";
  try {
    rec = reconstruct(cloud, cfg.mesh);
    if (!rec->report.manifold) mesh_status = "non_manifold";
  } catch (const Error& e) {
    mesh_status = error_code_name(e.code());
  }
  double mesh_time = mesh_clock.seconds();
  const std::vector<std::size_t> vertices = rec ? rec->vertices : net_vertices(cloud, cfg.mesh, eps);
  base.vertices = vertices.size();

  std::vector<std::size_t> pool = interior_candidates(cfg, cloud, vertices, eps);
  std::vector<IsomapRow> rows;
  if (pool.size() < cfg.landmarks || cfg.landmarks < static_cast<std::size_t>(k) + 1) {
    for (double r : cfg.radii) {
      IsomapRow row = base;
      row.method = "isomap";
      row.radius = r;
      row.rmse = kNaN;
      row.status = "too_few_landmarks";
      rows.push_back(row);
    }
    IsomapRow row = base;
    row.method = "mesh_isomap";
    row.radius = kNaN;
    row.rmse = kNaN;
    row.status = "too_few_landmarks";
    rows.push_back(row);
    return rows;
  }
  std::mt19937_64 rng(splitmix(seed ^ 0x4c414e44ULL));
  std::shuffle(pool.begin(), pool.end(), rng);
  std::vector<std::size_t> landmarks(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(cfg.landmarks));
  std::sort(landmarks.begin(), landmarks.end());
  base.landmarks = landmarks.size();

  Mat truth(static_cast<Eigen::Index>(landmarks.size()), k);
  for (std::size_t a = 0; a < landmarks.size(); ++a) {
    truth.row(static_cast<Eigen::Index>(a)) = isometric_coords(cfg.surface, cloud.point(landmarks[a])).transpose();
  }

  for (double r : cfg.radii) {
    Stopwatch clock;
    IsomapRow row = base;
    row.method = "isomap";
    row.radius = r;
    try {
      const Embedding e = isomap(cloud, k, r, &landmarks);
      row.rmse = procrustes_align(e.coords, truth).rmse;
    } catch (const Error& e) {
      row.rmse = kNaN;
      row.status = error_code_name(e.code());
    }
    row.wall_time = cfg.record_timing ? clock.seconds() : 0.0;
    rows.push_back(row);
  }

  IsomapRow mesh_row = base;
  mesh_row.method = "mesh_isomap";
  mesh_row.radius = kNaN;
  mesh_row.rmse = kNaN;
  mesh_row.status = mesh_status;
  if (mesh_status == "ok") {
    Stopwatch clock;
    try {
      const MeshIsomapResult res = mesh_isomap(std::move(*rec), k, &landmarks);
      mesh_row.rmse = procrustes_align(res.embedding.coords, truth).rmse;
    } catch (const Error& e) {
      mesh_row.status = error_code_name(e.code());
    }
    mesh_time += clock.seconds();
  }
  mesh_row.wall_time = cfg.record_timing ? mesh_time : 0.0;
  rows.push_back(mesh_row);
  return rows;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (repeats < 1) invalid_input("repeats must be at least 1");
  if (sample_sizes.empty()) invalid_input("at least one sample size is required");
  for (std::size_t n : sample_sizes) {
    if (n < static_cast<std::size_t>(surface.intrinsic_dim()) + 2) invalid_input("sample size too small for the surface");
  }
  for (double r : radii) {
    if (!(r > 0.0)) invalid_input("radii must be positive");
  }
  if (pair_subsample == 0) invalid_input("pair_subsample must be positive");
  if (landmark_margin < 0.0) invalid_input("landmark_margin must be nonnegative");
}

std::uint64_t repeat_seed(std::uint64_t base, std::size_t n, int repeat) {
  return splitmix(splitmix(base) ^ splitmix(static_cast<std::uint64_t>(n) << 20 ^ static_cast<std::uint64_t>(repeat)));
}

std::vector<std::pair<std::size_t, std::size_t>> sample_pairs(std::size_t m, std::size_t count, std::uint64_t seed) {
  const std::size_t total = m < 2 ? 0 : m * (m - 1) / 2;
  if (count > total) invalid_input("pair subsample exceeds the number of available pairs");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, m - 1);
  std::set<std::pair<std::size_t, std::size_t>> seen;
  std::vector<std::pair<std::size_t, std::size_t>> out;
  out.reserve(count);
  if (2 * count > total) {
    std::vector<std::pair<std::size_t, std::size_t>> all;
    all.reserve(total);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = i + 1; j < m; ++j) all.emplace_back(i, j);
    }
    std::shuffle(all.begin(), all.end(), rng);
    all.resize(count);
    return all;
  }
  while (out.size() < count) {
    std::size_t i = pick(rng), j = pick(rng);
    if (i == j) continue;
    if (i > j) std::swap(i, j);
    if (seen.insert({i, j}).second) out.emplace_back(i, j);
  }
  return out;
}

CsvTable DistanceExperiment::table() const {
  CsvTable t;
  t.columns = {"surface", "n", "vertices", "method", "radius", "repeat", "pairs", "mean_abs_error", "mean_rel_error", "eps_hat", "wall_time", "status"};
  for (const auto& r : rows) {
    t.add({r.surface, cell(r.n), cell(r.vertices), r.method, cell(r.radius), cell(r.repeat), cell(r.pairs), cell(r.mean_abs_error),
           cell(r.mean_rel_error), cell(r.eps_hat), cell(r.wall_time), r.status});
  }
  return t;
}

DistanceExperiment run_distance_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const Jobs jobs(cfg);
  std::vector<std::vector<DistanceRow>> parts(jobs.list.size());
  parallel_for(jobs.list.size(), [&](std::size_t j) { parts[j] = distance_repeat(cfg, jobs.list[j].first, jobs.list[j].second); });
  DistanceExperiment out;
  for (auto& p : parts) out.rows.insert(out.rows.end(), p.begin(), p.end());
  return out;
}

std::vector<std::size_t> interior_candidates(const ExperimentConfig& cfg, const PointCloud& cloud,
                                             const std::vector<std::size_t>& vertices, double eps_hat) {
  const AxisBox box = isometric_box(cfg.surface);
  std::vector<double> margin(box.lo.size());
  for (std::size_t a = 0; a < margin.size(); ++a) margin[a] = std::min(cfg.landmark_margin * eps_hat, 0.25 * (box.hi[a] - box.lo[a]));
  std::vector<std::size_t> out;
  for (std::size_t v : vertices) {
    const Vec c = isometric_coords(cfg.surface, cloud.point(v));
    bool inside = true;
    for (std::size_t a = 0; a < margin.size() && inside; ++a) {
      const auto q = static_cast<Eigen::Index>(a);
      inside = c(q) - box.lo[a] >= margin[a] && box.hi[a] - c(q) >= margin[a];
    }
    if (inside) out.push_back(v);
  }
  return out;
}

CsvTable IsomapExperiment::table() const {
  CsvTable t;
  t.columns = {"surface", "n", "vertices", "method", "radius", "repeat", "landmarks", "rmse", "eps_hat", "wall_time", "status"};
  for (const auto& r : rows) {
    t.add({r.surface, cell(r.n), cell(r.vertices), r.method, cell(r.radius), cell(r.repeat), cell(r.landmarks), cell(r.rmse), cell(r.eps_hat),
           cell(r.wall_time), r.status});
  }
  return t;
}

IsomapExperiment run_isomap_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  isometric_box(cfg.surface);
  const Jobs jobs(cfg);
  std::vector<std::vector<IsomapRow>> parts(jobs.list.size());
  parallel_for(jobs.list.size(), [&](std::size_t j) { parts[j] = isomap_repeat(cfg, jobs.list[j].first, jobs.list[j].second); });
  IsomapExperiment out;
  for (auto& p : parts) out.rows.insert(out.rows.end(), p.begin(), p.end());
  return out;
}

double bump_constant(double amplitude) {
  auto f = [](double t) {
    const double w = tricube_derivative(t);
    return w * w;
  };
  double err = 0.0;
  const double half = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, 0.0, 1.0, 20, 1e-13, &err);
  return amplitude * amplitude / 16.0 * 2.0 * half;
}

CsvTable LowerBoundExperiment::table() const {
  CsvTable t;
  t.columns = {"k", "m", "eps", "eta", "c1", "ratio_min", "ratio_median", "beta_ratio_min", "beta_ratio_median", "beta_identity_error",
               "axis_gap_max", "embedding_gap", "gap_ratio"};
  for (const auto& r : rows) {
    t.add({cell(r.k), cell(r.m), cell(r.eps), cell(r.eta), cell(r.c1), cell(r.ratio_min), cell(r.ratio_median), cell(r.beta_ratio_min),
           cell(r.beta_ratio_median), cell(r.beta_identity_error), cell(r.axis_gap_max), cell(r.embedding_gap), cell(r.gap_ratio)});
  }
  return t;
}

LowerBoundExperiment run_lower_bound_experiment(int k, const std::vector<int>& m_list, double amplitude) {
  LowerBoundExperiment out;
  const double c1 = bump_constant(amplitude);
  for (int m : m_list) {
    if (m < 3) invalid_input("lower-bound grids need m >= 3");
    const LowerBoundPair lb = lower_bound_pair(k, m, amplitude);
    LowerBoundRow row;
    row.k = k;
    row.m = m;
    row.eps = lb.eps;
    row.eta = lb.eta;
    row.c1 = c1;
    const double e2 = lb.eps * lb.eps;
    const double stretch = (lb.eta / lb.eps) * (lb.eta / lb.eps) - 1.0;
    const std::size_t n = lb.cloud.size();
    const auto last = static_cast<std::size_t>(k - 1);
    std::vector<double> ratio, beta_ratio;
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = a + 1; b < n; ++b) {
        const double d1 = lb.d1.at(a, b), d2 = lb.d2.at(a, b);
        const int step = lb.grid_index[a][last] - lb.grid_index[b][last];
        if (step == 0) {
          row.axis_gap_max = std::max(row.axis_gap_max, std::abs(d2 - d1));
          continue;
        }
        const double beta = std::abs(step) * lb.eps / d1;
        const double r = (d2 - d1) / (e2 * d1);
        ratio.push_back(r);
        beta_ratio.push_back(r / (beta * beta));
        if (stretch > 0.0) {
          const double identity = (d2 * d2 - d1 * d1) / (d1 * d1 * stretch);
          row.beta_identity_error = std::max(row.beta_identity_error, std::abs(identity - beta * beta));
        }
      }
    }
    row.ratio_min = ratio.empty() ? kNaN : *std::min_element(ratio.begin(), ratio.end());
    row.ratio_median = median_of(ratio);
    row.beta_ratio_min = beta_ratio.empty() ? kNaN : *std::min_element(beta_ratio.begin(), beta_ratio.end());
    row.beta_ratio_median = median_of(beta_ratio);
    row.embedding_gap = std::sqrt((lb.u1.coords - lb.u2.coords).rowwise().squaredNorm().mean());
    row.gap_ratio = row.embedding_gap / e2;
    out.rows.push_back(row);
  }
  return out;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < std::min(x.size(), y.size()); ++i) {
    if (x[i] > 0.0 && y[i] > 0.0 && std::isfinite(x[i]) && std::isfinite(y[i])) {
      lx.push_back(std::log(x[i]));
      ly.push_back(std::log(y[i]));
    }
  }
  if (lx.size() < 2) return kNaN;
  const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / static_cast<double>(lx.size());
  const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / static_cast<double>(ly.size());
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  return sxx > 0.0 ? sxy / sxx : kNaN;
}

}  // namespace geodesy
