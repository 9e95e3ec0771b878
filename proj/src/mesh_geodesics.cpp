#include "geodesy/mesh_geodesics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <queue>

#include "geodesy/error.hpp"
#include "geodesy/graph.hpp"
#include "geodesy/parallel.hpp"

namespace geodesy {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kSlack = 1e-10;
constexpr double kMinWidth = 1e-12;

using Window = GeodesicSolution::Window;
using Via = GeodesicSolution::Via;

struct Event {
  double key;
  std::size_t seq;
  bool is_vertex;
  std::size_t index;
  bool operator>(const Event& o) const { return key > o.key || (key == o.key && seq > o.seq); }
};

double cross2(double ax, double ay, double bx, double by) { return ax * by - ay * bx; }

}  // namespace

struct ExactGeodesicSolver::Impl {
  TriMesh mesh;
  HalfEdgeMesh he;
  std::vector<double> length;          // per half-edge
  std::vector<double> cx, cy;          // opposite vertex in each half-edge frame
  std::vector<char> pseudo;            // vertices that can bend geodesics
  std::vector<std::vector<std::size_t>> neighbors;

  explicit Impl(const TriMesh& m) : mesh(m), he(build_half_edges(m)) {
    if (!he.manifold) throw Error(ErrorCode::NonManifold, "mesh has edges shared by three or more faces");
    if (!he.oriented) throw Error(ErrorCode::NonManifold, "mesh has no consistent orientation");
    const std::size_t nh = he.half_edge_count();
    length.resize(nh);
    cx.resize(nh);
    cy.resize(nh);
    for (std::size_t h = 0; h < nh; ++h) length[h] = (mesh.vertex(he.target(h)) - mesh.vertex(he.origin(h))).norm();
    for (std::size_t h = 0; h < nh; ++h) {
      const double L = length[h];
      const double ac = length[HalfEdgeMesh::prev(h)];
      const double bc = length[HalfEdgeMesh::next(h)];
      const double x = L > 0.0 ? (L * L + ac * ac - bc * bc) / (2 * L) : 0.0;
      cx[h] = x;
      cy[h] = std::sqrt(std::max(0.0, ac * ac - x * x));
    }
    const std::size_t nv = mesh.vertex_count();
    std::vector<double> angle(nv, 0.0);
    std::vector<char> boundary(nv, 0);
    for (std::size_t h = 0; h < nh; ++h) {
      // Interior angle at the opposite vertex of h.
      const double L = length[h];
      const double ac = length[HalfEdgeMesh::prev(h)];
      const double bc = length[HalfEdgeMesh::next(h)];
      const double denom = 2 * ac * bc;
      const double cosine = denom > 0.0 ? std::clamp((ac * ac + bc * bc - L * L) / denom, -1.0, 1.0) : 1.0;
      angle[he.target(HalfEdgeMesh::next(h))] += std::acos(cosine);
      if (he.twin[h] == HalfEdgeMesh::kNone) {
        boundary[he.origin(h)] = 1;
        boundary[he.target(h)] = 1;
      }
    }
    pseudo.assign(nv, 0);
    for (std::size_t v = 0; v < nv; ++v) {
      pseudo[v] = (boundary[v] || angle[v] >= 2 * std::numbers::pi - 1e-9) ? 1 : 0;
    }
    neighbors.resize(nv);
    for (std::size_t h = 0; h < nh; ++h) {
      neighbors[he.origin(h)].push_back(he.target(h));
      neighbors[he.target(h)].push_back(he.origin(h));
    }
    for (auto& list : neighbors) {
      std::sort(list.begin(), list.end());
      list.erase(std::unique(list.begin(), list.end()), list.end());
    }
  }
};

ExactGeodesicSolver::ExactGeodesicSolver(const TriMesh& mesh) : impl_(std::make_unique<Impl>(mesh)) {}
ExactGeodesicSolver::~ExactGeodesicSolver() = default;
ExactGeodesicSolver::ExactGeodesicSolver(ExactGeodesicSolver&&) noexcept = default;
ExactGeodesicSolver& ExactGeodesicSolver::operator=(ExactGeodesicSolver&&) noexcept = default;

std::size_t ExactGeodesicSolver::vertex_count() const { return impl_->mesh.vertex_count(); }

GeodesicSolution ExactGeodesicSolver::solve(std::size_t source, const std::vector<std::size_t>* targets,
                                            bool keep_paths) const {
  const Impl& m = *impl_;
  const HalfEdgeMesh& he = m.he;
  const std::size_t nv = m.mesh.vertex_count();
  if (source >= nv) invalid_input("geodesic source out of range");

  GeodesicSolution sol;
  sol.source = source;
  sol.distance.assign(nv, kInf);
  sol.records.assign(nv, {});
  std::vector<Window>& windows = sol.windows;
  std::vector<char> alive;
  std::vector<char> emitted(nv, 0);
  std::vector<double> best_c(he.half_edge_count(), kInf);
  std::vector<double> best_x(he.half_edge_count(), 0.0);
  std::priority_queue<Event, std::vector<Event>, std::greater<>> queue;
  std::size_t seq = 0;

  auto update_vertex = [&](std::size_t v, double d, Via via, std::size_t index, int corner) {
    if (!(d < sol.distance[v] - kSlack * d)) return;
    sol.distance[v] = d;
    sol.records[v] = {via, index, corner};
    if ((m.pseudo[v] || via == Via::Source) && !emitted[v]) queue.push({d, seq++, true, v});
  };

  auto value_at = [](const Window& w, double x) { return w.sigma + std::hypot(x - w.sx, w.sy); };

  auto dominated = [&](const Window& w) {
    const double L = m.length[w.half_edge];
    const double d0 = sol.distance[he.origin(w.half_edge)];
    const double d1 = sol.distance[he.target(w.half_edge)];
    const double f1 = value_at(w, w.b1);
    const double f0 = value_at(w, w.b0);
    if (f1 - w.b1 > d0 + kSlack * (1 + f1)) return true;
    if (f0 + w.b0 > d1 + L + kSlack * (1 + f0)) return true;
    return false;
  };

  auto push_window = [&](Window w) {
    const double L = m.length[w.half_edge];
    w.b0 = std::clamp(w.b0, 0.0, L);
    w.b1 = std::clamp(w.b1, 0.0, L);
    if (!(w.b1 - w.b0 > kMinWidth * L)) return;
    if (dominated(w)) return;
    const double nearest = std::clamp(w.sx, w.b0, w.b1);
    const double key = value_at(w, nearest);
    windows.push_back(w);
    alive.push_back(1);
    ++sol.windows_created;
    queue.push({key, seq++, false, windows.size() - 1});
  };

  auto emit_vertex = [&](std::size_t v) {
    emitted[v] = 1;
    const double d = sol.distance[v];
    const Vec pv = m.mesh.vertex(v);
    for (std::size_t w : m.neighbors[v]) update_vertex(w, d + (m.mesh.vertex(w) - pv).norm(), Via::Vertex, v, 0);
    for (std::size_t f : he.vertex_faces[v]) {
      std::size_t c = 0;
      while (he.faces[f][c] != v) ++c;
      const std::size_t e = 3 * f + (c + 1) % 3;  // edge opposite v
      const std::ptrdiff_t t = he.twin[e];
      if (t == HalfEdgeMesh::kNone) continue;
      const auto g = static_cast<std::size_t>(t);
      const double L = m.length[g];
      const double qv = m.length[HalfEdgeMesh::next(e)];  // target(e) -> v, target(e) = origin(g)
      const double pvl = m.length[HalfEdgeMesh::prev(e)];
      const double x = (L * L + qv * qv - pvl * pvl) / (2 * L);
      const double y = -std::sqrt(std::max(0.0, qv * qv - x * x));
      push_window({g, 0.0, L, x, y, d, -1, v});
    }
  };

  auto propagate = [&](std::size_t wi) {
    const Window w = windows[wi];
    const std::size_t h = w.half_edge;
    const double L = m.length[h];
    const double Cx = m.cx[h], Cy = m.cy[h];
    const std::size_t va = he.origin(h), vb = he.target(h), vc = he.target(HalfEdgeMesh::next(h));
    if (w.b0 <= kSlack * L) update_vertex(va, value_at(w, 0.0), Via::Window, wi, 0);
    if (w.b1 >= L - kSlack * L) update_vertex(vb, value_at(w, L), Via::Window, wi, 1);

    const double xc = w.sx + (Cx - w.sx) * (-w.sy) / (Cy - w.sy);
    const double dc = w.sigma + std::hypot(Cx - w.sx, Cy - w.sy);
    double left_lo = w.b0, left_hi = std::min(w.b1, xc);
    double right_lo = std::max(w.b0, xc), right_hi = w.b1;
    if (xc >= w.b0 - kSlack * L && xc <= w.b1 + kSlack * L) {
      update_vertex(vc, dc, Via::Window, wi, 2);
      if (dc < best_c[h]) {
        best_c[h] = dc;
        best_x[h] = xc;
      }
    }
    if (dc > best_c[h] + kSlack * (1 + dc)) {
      // Rays crossing the best path to C on their way to the far side cannot be shortest.
      left_hi = std::min(left_hi, best_x[h]);
      right_lo = std::max(right_lo, best_x[h]);
    }

    auto child = [&](double lo, double hi, bool left) {
      if (!(hi - lo > kMinWidth * L)) return;
      const std::size_t inner = left ? HalfEdgeMesh::prev(h) : HalfEdgeMesh::next(h);
      const std::ptrdiff_t t = he.twin[inner];
      if (t == HalfEdgeMesh::kNone) return;
      const auto g = static_cast<std::size_t>(t);
      // Child edge runs P -> Q in the current frame: A -> C on the left, C -> B on the right.
      const double px = left ? 0.0 : Cx, py = left ? 0.0 : Cy;
      const double qx = left ? Cx : L, qy = left ? Cy : 0.0;
      const double ex = qx - px, ey = qy - py;
      const double elen = std::hypot(ex, ey);
      if (!(elen > 0.0)) return;
      auto param = [&](double x) {
        const double dx = x - w.sx, dy = -w.sy;
        const double denom = cross2(dx, dy, ex, ey);
        if (denom == 0.0) return std::numeric_limits<double>::quiet_NaN();
        return std::clamp(cross2(dx, dy, w.sx - px, w.sy - py) / denom, 0.0, 1.0);
      };
      const double t0 = param(lo), t1 = param(hi);
      if (!std::isfinite(t0) || !std::isfinite(t1)) return;
      const double ux = ex / elen, uy = ey / elen;
      const double rx = w.sx - px, ry = w.sy - py;
      Window c{};
      c.half_edge = g;
      const double Lg = m.length[g];
      c.b0 = std::min(t0, t1) * Lg;
      c.b1 = std::max(t0, t1) * Lg;
      c.sx = rx * ux + ry * uy;
      c.sy = std::min(0.0, cross2(ux, uy, rx, ry));
      c.sigma = w.sigma;
      c.parent_window = static_cast<std::ptrdiff_t>(wi);
      c.parent_vertex = nv;
      push_window(c);
    };
    child(left_lo, left_hi, true);
    child(right_lo, right_hi, false);
  };

  std::vector<std::size_t> goal;
  if (targets != nullptr) {
    for (std::size_t t : *targets) {
      if (t >= nv) invalid_input("geodesic target out of range");
      goal.push_back(t);
    }
  }

  auto goal_bound = [&] {
    double worst = 0.0;
    for (std::size_t t : goal) worst = std::max(worst, sol.distance[t]);
    return worst;
  };
  double bound = kInf;
  std::size_t since_refresh = 0;

  update_vertex(source, 0.0, Via::Source, source, 0);
  while (!queue.empty()) {
    const Event ev = queue.top();
    if (!goal.empty()) {
      // `bound` only ever overestimates the largest target distance.
      if (++since_refresh >= 64 || ev.key > bound) {
        bound = goal_bound();
        since_refresh = 0;
      }
      if (ev.key > bound) break;
    }
    queue.pop();
    if (ev.is_vertex) {
      if (emitted[ev.index] || ev.key != sol.distance[ev.index]) continue;
      emit_vertex(ev.index);
    } else {
      if (!alive[ev.index]) continue;
      alive[ev.index] = 0;
      if (dominated(windows[ev.index])) continue;
      propagate(ev.index);
    }
  }
  if (!keep_paths) {
    sol.windows.clear();
    sol.windows.shrink_to_fit();
    sol.records.clear();
  }
  sol.distance[source] = 0.0;
  return sol;
}

Polyline ExactGeodesicSolver::path(const GeodesicSolution& sol, std::size_t target) const {
  const Impl& m = *impl_;
  const HalfEdgeMesh& he = m.he;
  if (target >= sol.distance.size()) invalid_input("path target out of range");
  if (sol.records.empty()) invalid_input("solution was computed without path data");
  if (!std::isfinite(sol.distance[target])) throw Error(ErrorCode::NoPath, "target is unreachable from source");

  Polyline line;
  auto append = [&](const Vec& p) {
    if (line.vertices.empty() || (line.vertices.back() - p).norm() > 0.0) line.vertices.push_back(p);
  };
  std::size_t v = target;
  append(m.mesh.vertex(v));
  for (std::size_t guard = 0; guard < 4 * (sol.windows.size() + sol.distance.size()) + 4; ++guard) {
    const auto& rec = sol.records[v];
    if (rec.via == Via::Source) break;
    if (rec.via == Via::Vertex) {
      v = rec.index;
      append(m.mesh.vertex(v));
      continue;
    }
    if (rec.via != Via::Window) throw Error(ErrorCode::NoPath, "missing predecessor while backtracking");
    std::size_t wi = rec.index;
    const std::size_t h0 = sol.windows[wi].half_edge;
    double qx = rec.corner == 0 ? 0.0 : rec.corner == 1 ? m.length[h0] : m.cx[h0];
    double qy = rec.corner == 2 ? m.cy[h0] : 0.0;
    while (true) {
      const Window& w = sol.windows[wi];
      const double L = m.length[w.half_edge];
      double x = qy > 0.0 ? w.sx + (qx - w.sx) * (-w.sy) / (qy - w.sy) : qx;
      x = std::clamp(x, w.b0, w.b1);
      const Vec a = m.mesh.vertex(he.origin(w.half_edge));
      const Vec b = m.mesh.vertex(he.target(w.half_edge));
      append(a + (x / L) * (b - a));
      if (w.parent_window < 0) {
        v = w.parent_vertex;
        append(m.mesh.vertex(v));
        break;
      }
      const auto p = static_cast<std::size_t>(w.parent_window);
      const std::size_t ph = sol.windows[p].half_edge;
      const auto twin = static_cast<std::size_t>(he.twin[w.half_edge]);
      const double f = x / L;
      if (twin == HalfEdgeMesh::prev(ph)) {
        qx = f * m.cx[ph];
        qy = f * m.cy[ph];
      } else {
        qx = m.cx[ph] + f * (m.length[ph] - m.cx[ph]);
        qy = m.cy[ph] * (1 - f);
      }
      wi = p;
    }
  }
  std::reverse(line.vertices.begin(), line.vertices.end());
  if (line.vertices.size() == 1) line.vertices.push_back(line.vertices.front());
  return line;
}

GeodesicSolution exact_geodesics(const TriMesh& mesh, std::size_t source) {
  return ExactGeodesicSolver(mesh).solve(source);
}

GeodesicSolution steiner_geodesics(const TriMesh& mesh, std::size_t source, std::size_t subdivisions) {
  const std::size_t nv = mesh.vertex_count();
  if (source >= nv) invalid_input("geodesic source out of range");
  if (!build_half_edges(mesh).manifold) throw Error(ErrorCode::NonManifold, "mesh has edges shared by three or more faces");
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> edge_ids;
  for (const Face& f : mesh.faces) {
    for (std::size_t c = 0; c < 3; ++c) {
      std::size_t a = f[c], b = f[(c + 1) % 3];
      if (a > b) std::swap(a, b);
      edge_ids.emplace(std::make_pair(a, b), edge_ids.size());
    }
  }
  const std::size_t m = subdivisions;
  const std::size_t total = nv + m * edge_ids.size();
  std::vector<Vec> pos(total);
  for (std::size_t v = 0; v < nv; ++v) pos[v] = mesh.vertex(v);
  for (const auto& [key, id] : edge_ids) {
    const Vec a = mesh.vertex(key.first), b = mesh.vertex(key.second);
    for (std::size_t s = 0; s < m; ++s) {
      const double t = static_cast<double>(s + 1) / static_cast<double>(m + 1);
      pos[nv + id * m + s] = (1 - t) * a + t * b;
    }
  }
  NeighborhoodGraph g;
  g.n = total;
  g.adjacency.resize(total);
  std::vector<std::size_t> nodes;
  for (const Face& f : mesh.faces) {
    nodes.assign(f.begin(), f.end());
    for (std::size_t c = 0; c < 3; ++c) {
      std::size_t a = f[c], b = f[(c + 1) % 3];
      if (a > b) std::swap(a, b);
      const std::size_t id = edge_ids.at({a, b});
      for (std::size_t s = 0; s < m; ++s) nodes.push_back(nv + id * m + s);
    }
    for (std::size_t p = 0; p < nodes.size(); ++p) {
      for (std::size_t q = p + 1; q < nodes.size(); ++q) {
        const double w = (pos[nodes[p]] - pos[nodes[q]]).norm();
        g.adjacency[nodes[p]].push_back({nodes[q], w});
        g.adjacency[nodes[q]].push_back({nodes[p], w});
      }
    }
  }
  const ShortestPathTree tree = dijkstra(g, source);
  GeodesicSolution sol;
  sol.source = source;
  sol.distance.assign(tree.distance.begin(), tree.distance.begin() + static_cast<std::ptrdiff_t>(nv));
  return sol;
}

DistanceMatrix mesh_distance_matrix(const ExactGeodesicSolver& solver,
                                    const std::vector<std::pair<std::size_t, std::size_t>>& pairs) {
  const std::size_t nv = solver.vertex_count();
  std::map<std::size_t, std::vector<std::size_t>> by_source;
  for (const auto& [i, j] : pairs) {
    if (i >= nv || j >= nv) invalid_input("pair index out of range");
    by_source[i].push_back(j);
  }
  std::vector<std::pair<std::size_t, std::vector<std::size_t>>> groups(by_source.begin(), by_source.end());
  std::vector<std::vector<double>> rows(groups.size());
  parallel_for(groups.size(), [&](std::size_t g) {
    const GeodesicSolution sol = solver.solve(groups[g].first, &groups[g].second, false);
    rows[g] = sol.distance;
  });
  DistanceMatrix out(nv);
  for (std::size_t g = 0; g < groups.size(); ++g) {
    for (std::size_t j : groups[g].second) {
      if (j != groups[g].first) out.set(groups[g].first, j, rows[g][j]);
    }
  }
  return out;
}

DistanceMatrix mesh_distance_matrix(const TriMesh& mesh, const std::vector<std::pair<std::size_t, std::size_t>>& pairs) {
  return mesh_distance_matrix(ExactGeodesicSolver(mesh), pairs);
}

}  // namespace geodesy
