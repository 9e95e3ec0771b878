#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "geodesy/config.hpp"
#include "geodesy/embedding.hpp"
#include "geodesy/error.hpp"
#include "geodesy/experiments.hpp"
#include "geodesy/graph.hpp"
#include "geodesy/io.hpp"
#include "geodesy/mesh.hpp"
#include "geodesy/mesh_geodesics.hpp"
#include "geodesy/nets.hpp"
#include "geodesy/plots.hpp"
#include "geodesy/surfaces.hpp"
#include "geodesy/tangents.hpp"

namespace {

using namespace geodesy;

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 2;
constexpr int kExitReconstruction = 3;
constexpr int kExitDisconnected = 4;

int exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidInput: return kExitInvalid;
    case ErrorCode::ReconstructionFailure:
    case ErrorCode::NonManifold: return kExitReconstruction;
    case ErrorCode::Disconnected:
    case ErrorCode::NoPath: return kExitDisconnected;
    case ErrorCode::ConvergenceFailure: return 1;
  }
  return 1;
}

// Writes to the named file, or to stdout for "" and "-".
class Output {
 public:
  explicit Output(const std::string& path) {
    if (path.empty() || path == "-") return;
    file_.open(path);
    if (!file_) invalid_input("cannot write " + path);
  }
  std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

 private:
  std::ofstream file_;
};

struct MeshFlags {
  ReconstructionParams params;

  void attach(CLI::App* app) {
    app->add_option("--tangent-scale", params.tangent_scale, "tangent bandwidth h = A * eps_hat")->capture_default_str();
    app->add_option("--net-scale", params.net_scale, "net radius in units of eps_hat (0 keeps every point)")->capture_default_str();
    app->add_option("--max-edge-scale", params.max_edge_scale, "longest mesh edge in units of eps_hat")->capture_default_str();
    app->add_option("--perturb-radius", params.perturb_radius, "repair jitter radius (negative: 1% of the diameter)")->capture_default_str();
    app->add_option("--rounds", params.repair_rounds, "repair rounds")->capture_default_str();
    app->add_option("--mesh-seed", params.seed, "repair jitter seed")->capture_default_str();
  }
};

void print_reconstruction(const Reconstruction& rec) {
  std::cerr << "eps_hat=" << rec.eps_hat << " vertices=" << rec.vertices.size() << " inconsistencies " << rec.tdc.report.initial_count << " -> "
            << rec.tdc.report.final_count << " after " << rec.tdc.report.rounds_used << " rounds\n"
            << rec.report.summary() << "\n";
}

std::vector<std::pair<std::size_t, std::size_t>> all_pairs(std::size_t n) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) out.emplace_back(i, j);
  }
  return out;
}

int write_pair_distances(const std::vector<std::pair<std::size_t, std::size_t>>& pairs, const std::vector<double>& d, const std::string& out) {
  Output o(out);
  o.stream() << "i,j,distance\n";
  bool unreachable = false;
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    o.stream() << pairs[p].first << ',' << pairs[p].second << ',' << format_double(d[p]) << '\n';
    unreachable = unreachable || !std::isfinite(d[p]);
  }
  if (unreachable) {
    std::cerr << "some pairs are unreachable\n";
    return kExitDisconnected;
  }
  return kExitOk;
}

std::string dir_file(const std::string& dir, const std::string& name) { return (std::filesystem::path(dir) / name).string(); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Geodesic distance estimation from surface samples: neighbourhood graphs, tangential Delaunay meshes, exact mesh geodesics and Isomap."};
  app.require_subcommand(1);

  // sample
  auto* sample_cmd = app.add_subcommand("sample", "draw a point cloud from an analytic surface");
  std::string surface = "sphere", mode = "area", out;
  std::size_t n = 1000;
  std::uint64_t seed = 1;
  bool header = false;
  sample_cmd->add_option("--surface", surface, "sphere | torus | swiss | flat | bumped")->capture_default_str();
  sample_cmd->add_option("-n,--count", n, "number of points")->capture_default_str();
  sample_cmd->add_option("--seed", seed)->capture_default_str();
  sample_cmd->add_option("--mode", mode, "area | param | grid")->capture_default_str();
  sample_cmd->add_option("-o,--out", out, "output CSV (default stdout)");
  sample_cmd->add_flag("--header", header, "write an x0,...,x{d-1} header line");

  // Shared input options.
  std::string in;
  int dim = 2;
  auto add_input = [&](CLI::App* cmd) {
    cmd->add_option("-i,--in", in, "point cloud CSV")->required();
    cmd->add_option("--dim", dim, "intrinsic dimension k")->capture_default_str();
    cmd->add_option("-o,--out", out, "output file (default stdout)");
  };

  auto* net_cmd = app.add_subcommand("net", "extract an eps/2-separated net");
  double eps = 0.0;
  std::vector<std::size_t> anchors;
  add_input(net_cmd);
  net_cmd->add_option("--eps", eps, "net parameter (0: estimated resolution)");
  net_cmd->add_option("--anchors", anchors, "two point indices to keep first")->expected(2)->delimiter(',');

  auto* tan_cmd = app.add_subcommand("tangents", "estimate tangent planes by local PCA");
  double h = 0.0, tangent_scale = kDefaultTangentScale;
  add_input(tan_cmd);
  tan_cmd->add_option("--bandwidth", h, "neighbourhood radius h (0: scale * eps_hat)");
  tan_cmd->add_option("--scale", tangent_scale, "bandwidth multiplier when --bandwidth is not given")->capture_default_str();

  auto* mesh_cmd = app.add_subcommand("mesh", "reconstruct a tangential Delaunay mesh (OFF output)");
  MeshFlags mesh_flags;
  add_input(mesh_cmd);
  mesh_flags.attach(mesh_cmd);
  std::string validate_surface;
  mesh_cmd->add_option("--validate", validate_surface, "surface name for Hausdorff probes");

  auto* gd_cmd = app.add_subcommand("graph-dist", "neighbourhood-graph distances for index pairs");
  double radius = 0.0;
  std::string pairs_file, paths_file;
  add_input(gd_cmd);
  gd_cmd->add_option("--radius", radius, "connectivity radius")->required();
  gd_cmd->add_option("--pairs", pairs_file, "CSV of index pairs (default: all pairs)");

  auto* md_cmd = app.add_subcommand("mesh-dist", "exact (or Steiner) mesh distances for vertex pairs");
  std::string mesh_file;
  std::size_t steiner = 0;
  bool use_steiner = false;
  MeshFlags md_flags;
  md_cmd->add_option("--mesh", mesh_file, "OFF mesh; pair indices refer to its vertices");
  md_cmd->add_option("-i,--in", in, "point cloud CSV to reconstruct when no mesh is given; pairs then refer to cloud indices");
  md_cmd->add_option("--dim", dim)->capture_default_str();
  md_cmd->add_option("-o,--out", out);
  md_cmd->add_option("--pairs", pairs_file, "CSV of index pairs (default: all pairs)");
  md_cmd->add_option("--steiner", steiner, "use the Steiner graph with this many points per edge")->each([&](const std::string&) { use_steiner = true; });
  md_cmd->add_option("--paths", paths_file, "write path vertices as CSV rows (pair, step, x0, ...)");
  md_flags.attach(md_cmd);

  auto* iso_cmd = app.add_subcommand("isomap", "graph Isomap embedding");
  std::string landmarks_file;
  add_input(iso_cmd);
  iso_cmd->add_option("--radius", radius)->required();
  iso_cmd->add_option("--landmarks", landmarks_file, "CSV of point indices to embed");

  auto* miso_cmd = app.add_subcommand("mesh-isomap", "Mesh Isomap embedding");
  MeshFlags miso_flags;
  add_input(miso_cmd);
  miso_cmd->add_option("--landmarks", landmarks_file, "CSV of point indices to embed (must be mesh vertices)");
  miso_flags.attach(miso_cmd);

  auto* exp_cmd = app.add_subcommand("experiment", "run an experiment and write CSV tables and SVG plots");
  std::string kind, config_file;
  std::map<std::string, std::string> flag_values;
  exp_cmd->add_option("kind", kind, "distances | isomap | lowerbound")->required()->check(CLI::IsMember({"distances", "isomap", "lowerbound"}));
  exp_cmd->add_option("--config", config_file, "key=value file; flags override it");
  const std::vector<std::pair<std::string, std::string>> keyed = {
      {"--surface", "surface"},         {"--mode", "mode"},
      {"--sizes", "sizes"},             {"--radii", "radii"},
      {"--repeats", "repeats"},         {"--pairs", "pairs"},
      {"--landmarks", "landmarks"},     {"--landmark-margin", "landmark_margin"},
      {"--seed", "seed"},               {"--output", "output"},
      {"--tangent-scale", "tangent_scale"}, {"--net-scale", "net_scale"},
      {"--max-edge-scale", "max_edge_scale"}, {"--perturb-radius", "perturb_radius"},
      {"--rounds", "repair_rounds"},    {"--mesh-seed", "mesh_seed"},
      {"--timing", "timing"}};
  for (const auto& [flag, key] : keyed) {
    exp_cmd->add_option_function<std::string>(flag, [&flag_values, key = key](const std::string& v) { flag_values[key] = v; }, "config key " + key);
  }
  int lb_k = 1;
  std::vector<int> lb_m{11, 21, 41};
  double lb_amplitude = 1.0;
  exp_cmd->add_option("--k", lb_k, "lowerbound: intrinsic dimension")->capture_default_str();
  exp_cmd->add_option("--m", lb_m, "lowerbound: grid sizes")->delimiter(',')->capture_default_str();
  exp_cmd->add_option("--amplitude", lb_amplitude, "lowerbound: bump amplitude A")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInvalid;
  }

  try {
    if (*sample_cmd) {
      const PointCloud c = sample(parse_surface(surface), n, seed, parse_sampling_mode(mode));
      Output o(out);
      write_cloud_csv(o.stream(), c, header);
      return kExitOk;
    }
    if (*net_cmd) {
      const PointCloud c = load_cloud(in, dim);
      const double e = eps > 0.0 ? eps : estimate_resolution(c);
      std::optional<std::pair<std::size_t, std::size_t>> a;
      if (anchors.size() == 2) a = std::make_pair(anchors[0], anchors[1]);
      const NetOutcome res = extract_net(c, e, a);
      if (const auto* close = std::get_if<AnchorsTooClose>(&res)) {
        std::cerr << "anchors are within eps/2; chord estimate " << format_double(close->chord) << "\n";
        std::cout << format_double(close->chord) << "\n";
        return kExitOk;
      }
      const auto& net = std::get<NetResult>(res);
      std::cerr << "eps=" << e << " selected " << net.selected.size() << " of " << c.size() << "\n";
      Output o(out);
      write_indices_csv(o.stream(), net.selected);
      return kExitOk;
    }
    if (*tan_cmd) {
      const PointCloud c = load_cloud(in, dim);
      const double radius_h = h > 0.0 ? h : tangent_scale * estimate_resolution(c);
      const TangentField f = estimate_tangents(c, dim, radius_h);
      Output o(out);
      std::ostream& s = o.stream();
      for (int q = 0; q < dim; ++q) {
        for (int j = 0; j < c.ambient_dim(); ++j) s << "e" << q << "_" << j << ",";
      }
      s << "gap_ratio,neighbors,usable\n";
      for (std::size_t i = 0; i < f.size(); ++i) {
        const Mat& b = f.frames[i].basis;
        for (int q = 0; q < dim; ++q) {
          for (int j = 0; j < c.ambient_dim(); ++j) s << (q < b.cols() ? format_double(b(j, q)) : "nan") << ",";
        }
        s << format_double(f.gap_ratio[i]) << "," << f.neighbor_counts[i] << "," << int(f.usable[i]) << "\n";
      }
      return kExitOk;
    }
    if (*mesh_cmd) {
      const PointCloud c = load_cloud(in, dim);
      const Reconstruction rec = reconstruct(c, mesh_flags.params);
      print_reconstruction(rec);
      if (!validate_surface.empty()) std::cerr << validate_mesh(rec.tdc.mesh, parse_surface(validate_surface)).summary() << "\n";
      Output o(out);
      write_off(o.stream(), rec.tdc.mesh);
      return rec.report.manifold ? kExitOk : kExitReconstruction;
    }
    if (*gd_cmd) {
      const PointCloud c = load_cloud(in, dim);
      const auto pairs = pairs_file.empty() ? all_pairs(c.size()) : load_pairs(pairs_file);
      const NeighborhoodGraph g = build_graph(c, radius);
      if (!g.connected()) std::cerr << "warning: graph has " << g.component_count << " components\n";
      const DistanceMatrix d = graph_distance_matrix(g, pairs);
      std::vector<double> v;
      for (const auto& [i, j] : pairs) v.push_back(d.at(i, j));
      return write_pair_distances(pairs, v, out);
    }
    if (*md_cmd) {
      TriMesh mesh;
      std::vector<std::size_t> cloud_to_vertex;
      std::vector<std::pair<std::size_t, std::size_t>> pairs;
      if (!mesh_file.empty()) {
        mesh = load_off(mesh_file);
      } else if (!in.empty()) {
        const PointCloud c = load_cloud(in, dim);
        const Reconstruction rec = reconstruct(c, md_flags.params);
        print_reconstruction(rec);
        mesh = rec.tdc.mesh;
        cloud_to_vertex.assign(c.size(), std::numeric_limits<std::size_t>::max());
        for (std::size_t v = 0; v < rec.vertices.size(); ++v) cloud_to_vertex[rec.vertices[v]] = v;
      } else {
        invalid_input("mesh-dist needs --mesh or --in");
      }
      const auto requested = pairs_file.empty() ? all_pairs(cloud_to_vertex.empty() ? mesh.vertex_count() : cloud_to_vertex.size())
                                                : load_pairs(pairs_file);
      std::vector<std::pair<std::size_t, std::size_t>> local;
      auto to_vertex = [&](std::size_t i) {
        if (cloud_to_vertex.empty()) return i;
        if (i >= cloud_to_vertex.size() || cloud_to_vertex[i] == std::numeric_limits<std::size_t>::max()) {
          invalid_input("point " + std::to_string(i) + " is not a mesh vertex");
        }
        return cloud_to_vertex[i];
      };
      for (const auto& [i, j] : requested) {
        if (pairs_file.empty() && !cloud_to_vertex.empty() &&
            (cloud_to_vertex[i] == std::numeric_limits<std::size_t>::max() || cloud_to_vertex[j] == std::numeric_limits<std::size_t>::max())) {
          continue;
        }
        pairs.emplace_back(i, j);
        local.emplace_back(to_vertex(i), to_vertex(j));
      }
      std::vector<double> v(local.size());
      if (use_steiner) {
        std::map<std::size_t, std::vector<double>> rows;
        for (std::size_t p = 0; p < local.size(); ++p) {
          auto it = rows.find(local[p].first);
          if (it == rows.end()) it = rows.emplace(local[p].first, steiner_geodesics(mesh, local[p].first, steiner).distance).first;
          v[p] = it->second.at(local[p].second);
        }
      } else {
        const ExactGeodesicSolver solver(mesh);
        if (paths_file.empty()) {
          const DistanceMatrix d = mesh_distance_matrix(solver, local);
          for (std::size_t p = 0; p < local.size(); ++p) v[p] = local[p].first == local[p].second ? 0.0 : d.at(local[p].first, local[p].second);
        } else {
          Output po(paths_file);
          po.stream() << "pair,step";
          for (int q = 0; q < mesh.ambient_dim(); ++q) po.stream() << ",x" << q;
          po.stream() << "\n";
          for (std::size_t p = 0; p < local.size(); ++p) {
            const GeodesicSolution sol = solver.solve(local[p].first);
            v[p] = sol.distance.at(local[p].second);
            if (!std::isfinite(v[p])) continue;
            const Polyline path = solver.path(sol, local[p].second);
            for (std::size_t s = 0; s < path.vertices.size(); ++s) {
              po.stream() << p << "," << s;
              for (Eigen::Index q = 0; q < path.vertices[s].size(); ++q) po.stream() << "," << format_double(path.vertices[s](q));
              po.stream() << "\n";
            }
          }
        }
      }
      return write_pair_distances(pairs, v, out);
    }
    if (*iso_cmd) {
      const PointCloud c = load_cloud(in, dim);
      std::vector<std::size_t> lm;
      if (!landmarks_file.empty()) lm = load_indices(landmarks_file);
      const Embedding e = isomap(c, dim, radius, landmarks_file.empty() ? nullptr : &lm);
      Output o(out);
      write_matrix_csv(o.stream(), e.coords);
      return kExitOk;
    }
    if (*miso_cmd) {
      const PointCloud c = load_cloud(in, dim);
      std::vector<std::size_t> lm;
      if (!landmarks_file.empty()) lm = load_indices(landmarks_file);
      const MeshIsomapResult r = mesh_isomap(c, dim, miso_flags.params, landmarks_file.empty() ? nullptr : &lm);
      print_reconstruction(r.reconstruction);
      Output o(out);
      write_matrix_csv(o.stream(), r.embedding.coords);
      if (landmarks_file.empty()) std::cerr << "rows follow mesh vertex order (cloud indices as in the mesh)\n";
      return kExitOk;
    }
    if (*exp_cmd) {
      KeyValues values = config_file.empty() ? KeyValues{} : load_key_values(config_file);
      values = merge(std::move(values), flag_values);
      if (kind == "lowerbound") {
        const std::string dir = values.count("output") ? values["output"] : "";
        const LowerBoundExperiment res = run_lower_bound_experiment(lb_k, lb_m, lb_amplitude);
        const CsvTable t = res.table();
        t.write(std::cout);
        if (!dir.empty()) {
          std::filesystem::create_directories(dir);
          t.save(dir_file(dir, "lowerbound.csv"));
          for (const auto& f : emit_plots(res, dir)) std::cerr << "wrote " << f << "\n";
        }
        return kExitOk;
      }
      ExperimentConfig base;
      if (kind == "isomap") {
        base.surface = SurfaceSpec::swiss_roll();
        base.sample_sizes = {1000};
        base.radii = {0.2, 0.25, 0.3, 0.35, 0.4};
      }
      const ExperimentConfig cfg = experiment_config(values, base);
      CsvTable table;
      std::vector<std::string> plots;
      if (!cfg.output_dir.empty()) std::filesystem::create_directories(cfg.output_dir);
      if (kind == "distances") {
        const DistanceExperiment res = run_distance_experiment(cfg);
        table = res.table();
        if (!cfg.output_dir.empty()) plots = emit_plots(res, cfg.output_dir);
      } else {
        const IsomapExperiment res = run_isomap_experiment(cfg);
        table = res.table();
        if (!cfg.output_dir.empty()) plots = emit_plots(res, cfg.output_dir);
      }
      if (cfg.output_dir.empty()) {
        table.write(std::cout);
      } else {
        const std::string csv = dir_file(cfg.output_dir, kind + ".csv");
        table.save(csv);
        std::cerr << "wrote " << csv << "\n";
        for (const auto& f : plots) std::cerr << "wrote " << f << "\n";
      }
      return kExitOk;
    }
  } catch (const Error& e) {
    std::cerr << "error (" << error_code_name(e.code()) << "): " << e.what() << "\n";
    return exit_code(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return kExitOk;
}
