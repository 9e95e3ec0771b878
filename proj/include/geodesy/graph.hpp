#pragma once

// r-ball neighbourhood graphs and Dijkstra shortest paths.

#include <cstddef>
#include <utility>
#include <vector>

#include "geodesy/distance_matrix.hpp"
#include "geodesy/geometry.hpp"

namespace geodesy {

struct GraphEdge {
  std::size_t to;
  double weight;
};

struct NeighborhoodGraph {
  std::size_t n = 0;
  double radius = 0.0;
  std::vector<std::vector<GraphEdge>> adjacency;  ///< sorted by neighbour index
  std::vector<std::size_t> component;             ///< component label per vertex, labels in order of first vertex
  std::size_t component_count = 0;

  bool connected() const { return component_count <= 1; }
  std::size_t edge_count() const;
};

/// Edge (i, j) iff |x_i - x_j| <= r, weighted by the Euclidean distance.
NeighborhoodGraph build_graph(const PointCloud& cloud, double r);

/// Graph from explicit weighted edges (used for oracles and tests). Duplicate edges keep the lighter weight.
NeighborhoodGraph graph_from_edges(std::size_t n, const std::vector<std::pair<std::pair<std::size_t, std::size_t>, double>>& edges);

struct ShortestPathTree {
  std::size_t source = 0;
  std::vector<double> distance;       ///< +inf when unreachable
  std::vector<std::size_t> previous;  ///< predecessor, or n for the source and unreachable vertices
};

/// Single-source Dijkstra with (distance, index) ordering; equal-length relaxations keep the
/// smallest predecessor index.
ShortestPathTree dijkstra(const NeighborhoodGraph& g, std::size_t source);

/// One distance row per source, computed concurrently.
std::vector<std::vector<double>> graph_distances(const NeighborhoodGraph& g, const std::vector<std::size_t>& sources);

/// Distances for the requested pairs (one Dijkstra per distinct first index).
DistanceMatrix graph_distance_matrix(const NeighborhoodGraph& g, const std::vector<std::pair<std::size_t, std::size_t>>& pairs);

/// Vertex sequence of a shortest i-to-j path. Throws NoPath when j is unreachable.
std::vector<std::size_t> graph_path_indices(const NeighborhoodGraph& g, std::size_t i, std::size_t j);
Polyline graph_path(const NeighborhoodGraph& g, const PointCloud& cloud, std::size_t i, std::size_t j);

}  // namespace geodesy
