#include "geodesy/graph.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <queue>

#include "geodesy/error.hpp"
#include "geodesy/parallel.hpp"
#include "geodesy/spatial_index.hpp"

namespace geodesy {

namespace {

void label_components(NeighborhoodGraph& g) {
  g.component.assign(g.n, g.n);
  g.component_count = 0;
  std::vector<std::size_t> stack;
  for (std::size_t s = 0; s < g.n; ++s) {
    if (g.component[s] != g.n) continue;
    const std::size_t label = g.component_count++;
    g.component[s] = label;
    stack.push_back(s);
    while (!stack.empty()) {
      const std::size_t u = stack.back();
      stack.pop_back();
      for (const GraphEdge& e : g.adjacency[u]) {
        if (g.component[e.to] == g.n) {
          g.component[e.to] = label;
          stack.push_back(e.to);
        }
      }
    }
  }
}

}  // namespace

std::size_t NeighborhoodGraph::edge_count() const {
  std::size_t total = 0;
  for (const auto& row : adjacency) total += row.size();
  return total / 2;
}

NeighborhoodGraph build_graph(const PointCloud& cloud, double r) {
  if (!(r > 0.0)) invalid_input("graph radius must be positive");
  NeighborhoodGraph g;
  g.n = cloud.size();
  g.radius = r;
  g.adjacency.resize(g.n);
  const RadiusIndex index(cloud, r);
  parallel_for(g.n, [&](std::size_t i) {
    const Vec xi = cloud.point(i);
    for (std::size_t j : index.query(xi, r)) {
      if (j == i) continue;
      g.adjacency[i].push_back({j, (cloud.point(j) - xi).norm()});
    }
  });
  // Make weights bitwise symmetric.
  for (std::size_t i = 0; i < g.n; ++i) {
    for (GraphEdge& e : g.adjacency[i]) {
      if (e.to < i) {
        const auto& back = g.adjacency[e.to];
        auto it = std::lower_bound(back.begin(), back.end(), i, [](const GraphEdge& a, std::size_t v) { return a.to < v; });
        e.weight = it->weight;
      }
    }
  }
  label_components(g);
  return g;
}

NeighborhoodGraph graph_from_edges(std::size_t n, const std::vector<std::pair<std::pair<std::size_t, std::size_t>, double>>& edges) {
  std::map<std::pair<std::size_t, std::size_t>, double> unique;
  for (const auto& [ij, w] : edges) {
    auto [i, j] = ij;
    if (i >= n || j >= n) invalid_input("edge endpoint out of range");
    if (i == j) continue;
    if (!(w >= 0.0)) invalid_input("edge weights must be nonnegative");
    if (i > j) std::swap(i, j);
    auto [it, inserted] = unique.emplace(std::make_pair(i, j), w);
    if (!inserted) it->second = std::min(it->second, w);
  }
  NeighborhoodGraph g;
  g.n = n;
  g.adjacency.resize(n);
  for (const auto& [ij, w] : unique) {
    g.adjacency[ij.first].push_back({ij.second, w});
    g.adjacency[ij.second].push_back({ij.first, w});
  }
  for (auto& row : g.adjacency) {
    std::sort(row.begin(), row.end(), [](const GraphEdge& a, const GraphEdge& b) { return a.to < b.to; });
  }
  label_components(g);
  return g;
}

ShortestPathTree dijkstra(const NeighborhoodGraph& g, std::size_t source) {
  if (source >= g.n) invalid_input("source index out of range");
  ShortestPathTree tree;
  tree.source = source;
  tree.distance.assign(g.n, std::numeric_limits<double>::infinity());
  tree.previous.assign(g.n, g.n);
  std::vector<char> done(g.n, 0);
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
  tree.distance[source] = 0.0;
  queue.emplace(0.0, source);
  while (!queue.empty()) {
    const auto [du, u] = queue.top();
    queue.pop();
    if (done[u]) continue;
    done[u] = 1;
    for (const GraphEdge& e : g.adjacency[u]) {
      if (done[e.to]) continue;
      const double cand = du + e.weight;
      double& dv = tree.distance[e.to];
      if (cand < dv) {
        dv = cand;
        tree.previous[e.to] = u;
        queue.emplace(cand, e.to);
      } else if (cand == dv && u < tree.previous[e.to]) {
        tree.previous[e.to] = u;
      }
    }
  }
  return tree;
}

std::vector<std::vector<double>> graph_distances(const NeighborhoodGraph& g, const std::vector<std::size_t>& sources) {
  std::vector<std::vector<double>> rows(sources.size());
  parallel_for(sources.size(), [&](std::size_t s) { rows[s] = dijkstra(g, sources[s]).distance; });
  return rows;
}

DistanceMatrix graph_distance_matrix(const NeighborhoodGraph& g, const std::vector<std::pair<std::size_t, std::size_t>>& pairs) {
  std::vector<std::size_t> sources;
  for (const auto& [i, j] : pairs) {
    if (i >= g.n || j >= g.n) invalid_input("pair index out of range");
    sources.push_back(i);
  }
  std::sort(sources.begin(), sources.end());
  sources.erase(std::unique(sources.begin(), sources.end()), sources.end());
  const auto rows = graph_distances(g, sources);
  DistanceMatrix out(g.n);
  for (const auto& [i, j] : pairs) {
    const auto s = static_cast<std::size_t>(std::lower_bound(sources.begin(), sources.end(), i) - sources.begin());
    if (i != j) out.set(i, j, rows[s][j]);
  }
  return out;
}

std::vector<std::size_t> graph_path_indices(const NeighborhoodGraph& g, std::size_t i, std::size_t j) {
  if (j >= g.n) invalid_input("target index out of range");
  const ShortestPathTree tree = dijkstra(g, i);
  if (!std::isfinite(tree.distance[j])) throw Error(ErrorCode::NoPath, "target is unreachable from source");
  std::vector<std::size_t> path{j};
  while (path.back() != i) path.push_back(tree.previous[path.back()]);
  std::reverse(path.begin(), path.end());
  return path;
}

Polyline graph_path(const NeighborhoodGraph& g, const PointCloud& cloud, std::size_t i, std::size_t j) {
  Polyline line;
  for (std::size_t v : graph_path_indices(g, i, j)) line.vertices.push_back(cloud.point(v));
  if (line.vertices.size() == 1) line.vertices.push_back(line.vertices.front());
  return line;
}

}  // namespace geodesy
