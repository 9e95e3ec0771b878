#include "geodesy/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <map>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

#include "geodesy/error.hpp"
#include "geodesy/parallel.hpp"

namespace geodesy {

Simplex TriMesh::face_simplex(std::size_t f) const {
  Simplex s;
  for (std::size_t v : faces[f]) s.vertices.push_back(vertex(v));
  return s;
}

void TriMesh::refresh_thickness() {
  face_thickness.resize(faces.size());
  for (std::size_t f = 0; f < faces.size(); ++f) face_thickness[f] = simplex_thickness(face_simplex(f)).value;
}

namespace {

using EdgeKey = std::pair<std::size_t, std::size_t>;

EdgeKey edge_key(std::size_t a, std::size_t b) { return a < b ? EdgeKey{a, b} : EdgeKey{b, a}; }

std::map<EdgeKey, std::vector<std::size_t>> edge_half_edges(const std::vector<Face>& faces) {
  std::map<EdgeKey, std::vector<std::size_t>> edges;
  for (std::size_t f = 0; f < faces.size(); ++f) {
    for (std::size_t c = 0; c < 3; ++c) edges[edge_key(faces[f][c], faces[f][(c + 1) % 3])].push_back(3 * f + c);
  }
  return edges;
}

std::size_t find_root(std::vector<std::size_t>& parent, std::size_t x) {
  while (parent[x] != x) {
    parent[x] = parent[parent[x]];
    x = parent[x];
  }
  return x;
}

}  // namespace

HalfEdgeMesh build_half_edges(const TriMesh& mesh) {
  HalfEdgeMesh he;
  const std::size_t nf = mesh.faces.size();
  for (const Face& f : mesh.faces) {
    for (std::size_t v : f) {
      if (v >= mesh.vertex_count()) invalid_input("face references a missing vertex");
    }
  }
  const auto edges = edge_half_edges(mesh.faces);
  he.edge_count = edges.size();

  // Breadth-first orientation: flip[f] reverses face f.
  std::vector<int> flip(nf, -1);
  auto directed = [&](std::size_t h) {
    const std::size_t f = h / 3, c = h % 3;
    const Face& face = mesh.faces[f];
    std::size_t a = face[c], b = face[(c + 1) % 3];
    if (flip[f] == 1) std::swap(a, b);
    return std::make_pair(a, b);
  };
  std::vector<std::size_t> queue;
  for (std::size_t seed = 0; seed < nf; ++seed) {
    if (flip[seed] != -1) continue;
    flip[seed] = 0;
    queue.assign(1, seed);
    for (std::size_t qi = 0; qi < queue.size(); ++qi) {
      const std::size_t f = queue[qi];
      for (std::size_t c = 0; c < 3; ++c) {
        const std::size_t h = 3 * f + c;
        const auto& users = edges.at(edge_key(mesh.faces[f][c], mesh.faces[f][(c + 1) % 3]));
        if (users.size() != 2) continue;
        const std::size_t other = users[0] == h ? users[1] : users[0];
        const std::size_t g = other / 3;
        if (g == f) continue;
        const auto mine = directed(h);
        if (flip[g] == -1) {
          flip[g] = 0;
          if (directed(other) == mine) flip[g] = 1;
          queue.push_back(g);
        } else if (directed(other) == mine) {
          he.oriented = false;
        }
      }
    }
  }

  he.faces.resize(nf);
  for (std::size_t f = 0; f < nf; ++f) {
    he.faces[f] = mesh.faces[f];
    if (flip[f] == 1) std::swap(he.faces[f][1], he.faces[f][2]);
  }
  he.twin.assign(3 * nf, HalfEdgeMesh::kNone);
  // Recompute half-edge indices against the oriented faces.
  const auto oriented_edges = edge_half_edges(he.faces);
  for (const auto& [key, users] : oriented_edges) {
    if (users.size() == 1) {
      ++he.boundary_edge_count;
    } else if (users.size() == 2) {
      he.twin[users[0]] = static_cast<std::ptrdiff_t>(users[1]);
      he.twin[users[1]] = static_cast<std::ptrdiff_t>(users[0]);
    } else {
      he.manifold = false;
      he.non_manifold_edges.push_back(key);
    }
  }
  he.vertex_faces.resize(mesh.vertex_count());
  for (std::size_t f = 0; f < nf; ++f) {
    for (std::size_t v : he.faces[f]) he.vertex_faces[v].push_back(f);
  }
  return he;
}

std::string MeshReport::summary() const {
  std::ostringstream s;
  s << "V=" << vertices << " E=" << edges << " F=" << faces << " chi=" << euler_characteristic
    << " components=" << components << " boundary_edges=" << boundary_edges
    << " non_manifold_edges=" << non_manifold_edges << " non_manifold_vertices=" << non_manifold_vertices
    << " duplicate_faces=" << duplicate_faces << " degenerate_faces=" << degenerate_faces
    << " oriented=" << (oriented ? "yes" : "no") << " min_thickness=" << min_thickness
    << " max_diameter=" << max_diameter;
  if (hausdorff_mesh_to_surface) s << " hausdorff_mesh_to_surface=" << *hausdorff_mesh_to_surface;
  if (hausdorff_surface_to_mesh) s << " hausdorff_surface_to_mesh=" << *hausdorff_surface_to_mesh;
  return s.str();
}

double point_triangle_distance(const Vec& x, const Vec& a, const Vec& b, const Vec& c) {
  auto segment = [&](const Vec& p, const Vec& q) {
    const Vec pq = q - p;
    const double len2 = pq.squaredNorm();
    const double t = len2 > 0.0 ? std::clamp((x - p).dot(pq) / len2, 0.0, 1.0) : 0.0;
    return (x - (p + t * pq)).norm();
  };
  const Vec e1 = b - a, e2 = c - a, w = x - a;
  const double a11 = e1.dot(e1), a12 = e1.dot(e2), a22 = e2.dot(e2);
  const double det = a11 * a22 - a12 * a12;
  if (det > 1e-300) {
    const double r1 = e1.dot(w), r2 = e2.dot(w);
    const double s = (a22 * r1 - a12 * r2) / det;
    const double t = (a11 * r2 - a12 * r1) / det;
    if (s >= 0.0 && t >= 0.0 && s + t <= 1.0) return (w - s * e1 - t * e2).norm();
  }
  return std::min({segment(a, b), segment(b, c), segment(c, a)});
}

MeshReport validate_mesh(const TriMesh& mesh, const std::optional<SurfaceSpec>& spec, std::size_t probes,
                         std::uint64_t seed) {
  if (mesh.faces.empty()) invalid_input("cannot validate an empty mesh");
  MeshReport r;
  const HalfEdgeMesh he = build_half_edges(mesh);
  const std::size_t nv = mesh.vertex_count();
  std::vector<char> used(nv, 0);
  for (const Face& f : mesh.faces) {
    for (std::size_t v : f) used[v] = 1;
  }
  r.vertices = static_cast<std::size_t>(std::count(used.begin(), used.end(), 1));
  r.isolated_vertices = nv - r.vertices;
  r.edges = he.edge_count;
  r.faces = mesh.faces.size();
  r.euler_characteristic = static_cast<long>(r.vertices) - static_cast<long>(r.edges) + static_cast<long>(r.faces);
  r.boundary_edges = he.boundary_edge_count;
  r.non_manifold_edges = he.non_manifold_edges.size();
  r.oriented = he.oriented;

  std::map<Face, int> seen;
  for (const Face& f : mesh.faces) {
    Face s = f;
    std::sort(s.begin(), s.end());
    if (s[0] == s[1] || s[1] == s[2]) ++r.degenerate_faces;
    if (++seen[s] == 2) ++r.duplicate_faces;
  }

  r.min_thickness = std::numeric_limits<double>::infinity();
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    const Simplex s = mesh.face_simplex(f);
    const Thickness t = simplex_thickness(s);
    if (t.degenerate) ++r.degenerate_faces;
    r.min_thickness = std::min(r.min_thickness, t.value);
    r.max_diameter = std::max(r.max_diameter, simplex_diameter(s));
  }

  // Face-graph components.
  std::vector<std::size_t> parent(mesh.faces.size());
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  for (const auto& users : edge_half_edges(mesh.faces)) {
    for (std::size_t u = 1; u < users.second.size(); ++u) {
      parent[find_root(parent, users.second[0] / 3)] = find_root(parent, users.second[u] / 3);
    }
  }
  for (std::size_t f = 0; f < parent.size(); ++f) r.components += find_root(parent, f) == f ? 1 : 0;

  // Vertex links: faces around v must form one fan.
  for (std::size_t v = 0; v < nv; ++v) {
    const auto& around = he.vertex_faces[v];
    if (around.size() < 2) continue;
    std::vector<std::size_t> local(around.size());
    std::iota(local.begin(), local.end(), std::size_t{0});
    std::map<std::size_t, std::size_t> first_with;
    for (std::size_t a = 0; a < around.size(); ++a) {
      for (std::size_t w : he.faces[around[a]]) {
        if (w == v) continue;
        auto [it, inserted] = first_with.emplace(w, a);
        if (!inserted) local[find_root(local, a)] = find_root(local, it->second);
      }
    }
    std::size_t fans = 0;
    for (std::size_t a = 0; a < local.size(); ++a) fans += find_root(local, a) == a ? 1 : 0;
    if (fans > 1) ++r.non_manifold_vertices;
  }

  r.manifold = r.non_manifold_edges == 0 && r.non_manifold_vertices == 0 && r.duplicate_faces == 0 && r.oriented;
  r.closed = r.manifold && r.boundary_edges == 0;

  if (spec && probes > 0 && spec->kind != SurfaceKind::BumpedGrid && spec->ambient_dim() == mesh.ambient_dim()) {
    // Mesh to surface: area-weighted random points on faces.
    std::vector<double> cumulative(mesh.faces.size());
    double total = 0.0;
    for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
      const Vec a = mesh.vertex(mesh.faces[f][0]);
      const Vec e1 = mesh.vertex(mesh.faces[f][1]) - a, e2 = mesh.vertex(mesh.faces[f][2]) - a;
      const double area2 = std::sqrt(std::max(0.0, e1.squaredNorm() * e2.squaredNorm() - std::pow(e1.dot(e2), 2)));
      total += area2;
      cumulative[f] = total;
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<Vec> on_mesh(probes);
    for (Vec& p : on_mesh) {
      const double pick = unit(rng) * total;
      const auto f = static_cast<std::size_t>(std::lower_bound(cumulative.begin(), cumulative.end(), pick) - cumulative.begin());
      const Face& face = mesh.faces[std::min(f, mesh.faces.size() - 1)];
      double s = unit(rng), t = unit(rng);
      if (s + t > 1.0) {
        s = 1.0 - s;
        t = 1.0 - t;
      }
      p = (1 - s - t) * mesh.vertex(face[0]) + s * mesh.vertex(face[1]) + t * mesh.vertex(face[2]);
    }
    std::vector<double> d1(probes);
    parallel_for(probes, [&](std::size_t i) { d1[i] = distance_to_surface(*spec, on_mesh[i]); });
    r.hausdorff_mesh_to_surface = *std::max_element(d1.begin(), d1.end());

    // Surface to mesh: probes on the surface, candidate faces around the nearest mesh vertices.
    const SamplingMode mode = SamplingMode::AreaUniform;
    const PointCloud surface_probes = sample(*spec, probes, seed + 1, mode);
    PointCloud verts(mesh.vertices, 2);
    std::vector<double> d2(probes);
    parallel_for(probes, [&](std::size_t i) {
      const Vec x = surface_probes.point(i);
      const std::vector<double> sq = verts.squared_distances_to(x);
      std::vector<std::size_t> order;
      for (std::size_t v = 0; v < nv; ++v) {
        if (used[v]) order.push_back(v);
      }
      const std::size_t keep = std::min<std::size_t>(8, order.size());
      std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(keep), order.end(),
                        [&](std::size_t a, std::size_t b) { return sq[a] < sq[b] || (sq[a] == sq[b] && a < b); });
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t q = 0; q < keep; ++q) {
        for (std::size_t f : he.vertex_faces[order[q]]) {
          const Face& face = mesh.faces[f];
          best = std::min(best, point_triangle_distance(x, mesh.vertex(face[0]), mesh.vertex(face[1]), mesh.vertex(face[2])));
        }
      }
      d2[i] = best;
    });
    r.hausdorff_surface_to_mesh = *std::max_element(d2.begin(), d2.end());
  }
  return r;
}

void write_off(std::ostream& out, const TriMesh& mesh) {
  if (mesh.ambient_dim() != 3) invalid_input("OFF output needs three-dimensional vertices");
  out << "OFF\n" << mesh.vertex_count() << ' ' << mesh.face_count() << " 0\n";
  out << std::setprecision(17);
  for (std::size_t v = 0; v < mesh.vertex_count(); ++v) {
    out << mesh.vertices(static_cast<Eigen::Index>(v), 0) << ' ' << mesh.vertices(static_cast<Eigen::Index>(v), 1) << ' '
        << mesh.vertices(static_cast<Eigen::Index>(v), 2) << '\n';
  }
  for (const Face& f : mesh.faces) out << "3 " << f[0] << ' ' << f[1] << ' ' << f[2] << '\n';
}

TriMesh read_off(std::istream& in) {
  // Tokenize, dropping comments.
  std::vector<std::string> tokens;
  std::string line;
  while (std::getline(in, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string tok;
    while (ls >> tok) tokens.push_back(tok);
  }
  std::size_t pos = 0;
  auto next = [&]() -> const std::string& {
    if (pos >= tokens.size()) invalid_input("truncated OFF file");
    return tokens[pos++];
  };
  auto next_size = [&]() {
    const std::string& t = next();
    std::size_t used = 0;
    long long v = 0;
    try {
      v = std::stoll(t, &used);
    } catch (const std::exception&) {
      invalid_input("expected an integer in OFF file, got '" + t + "'");
    }
    if (used != t.size() || v < 0) invalid_input("expected a nonnegative integer in OFF file, got '" + t + "'");
    return static_cast<std::size_t>(v);
  };
  if (next() != "OFF") invalid_input("OFF header missing");
  const std::size_t nv = next_size();
  const std::size_t nf = next_size();
  next_size();
  TriMesh mesh;
  mesh.vertices.resize(static_cast<Eigen::Index>(nv), 3);
  for (std::size_t v = 0; v < nv; ++v) {
    for (int c = 0; c < 3; ++c) {
      const std::string& t = next();
      std::size_t used = 0;
      double x = 0.0;
      try {
        x = std::stod(t, &used);
      } catch (const std::exception&) {
        invalid_input("bad coordinate in OFF file: '" + t + "'");
      }
      if (used != t.size() || !std::isfinite(x)) invalid_input("bad coordinate in OFF file: '" + t + "'");
      mesh.vertices(static_cast<Eigen::Index>(v), c) = x;
    }
  }
  for (std::size_t f = 0; f < nf; ++f) {
    if (next_size() != 3) invalid_input("only triangular OFF faces are supported");
    Face face{};
    for (auto& idx : face) {
      idx = next_size();
      if (idx >= nv) invalid_input("OFF face references a missing vertex");
    }
    mesh.faces.push_back(face);
  }
  mesh.source_index.resize(nv);
  std::iota(mesh.source_index.begin(), mesh.source_index.end(), std::size_t{0});
  mesh.refresh_thickness();
  return mesh;
}

void save_off(const std::string& path, const TriMesh& mesh) {
  std::ofstream out(path);
  if (!out) invalid_input("cannot open '" + path + "' for writing");
  write_off(out, mesh);
}

TriMesh load_off(const std::string& path) {
  std::ifstream in(path);
  if (!in) invalid_input("cannot open '" + path + "'");
  return read_off(in);
}

}  // namespace geodesy
