#include <cmath>
#include <limits>
#include <random>

#include "doctest.h"
#include "geodesy/error.hpp"
#include "geodesy/graph.hpp"
#include "geodesy/surfaces.hpp"
#include "support/oracles.hpp"

using namespace geodesy;

namespace {

using EdgeList = std::vector<std::pair<std::pair<std::size_t, std::size_t>, double>>;

PointCloud collinear(std::initializer_list<double> xs) {
  Mat pts = Mat::Zero(static_cast<Eigen::Index>(xs.size()), 2);
  Eigen::Index i = 0;
  for (double x : xs) pts(i++, 0) = x;
  return PointCloud(pts, 1);
}

}  // namespace

TEST_SUITE("graph-geodesics") {

TEST_CASE("radius graph on collinear points") {
  const NeighborhoodGraph g = build_graph(collinear({0, 1, 2}), 1.0);
  CHECK(g.edge_count() == 2);
  REQUIRE(g.adjacency[0].size() == 1);
  CHECK(g.adjacency[0][0].to == 1);
  CHECK(g.adjacency[0][0].weight == 1.0);
  CHECK(g.connected());
  const auto d = graph_distances(g, {0});
  CHECK(d[0][2] == 2.0);
  CHECK(graph_path_indices(g, 0, 2) == std::vector<std::size_t>{0, 1, 2});
  CHECK(graph_path_indices(g, 1, 1) == std::vector<std::size_t>{1});
  CHECK_THROWS_AS(build_graph(collinear({0, 1}), 0.0), Error);
}

TEST_CASE("edgeless and complete extremes") {
  const PointCloud c = collinear({0, 1, 3, 6});
  const NeighborhoodGraph none = build_graph(c, 0.5);
  CHECK(none.edge_count() == 0);
  CHECK_FALSE(none.connected());
  CHECK(none.component_count == 4);
  const auto d = graph_distances(none, {0});
  CHECK(std::isinf(d[0][3]));
  CHECK_THROWS_AS(graph_path(none, c, 0, 3), Error);
  try {
    graph_path_indices(none, 0, 3);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NoPath);
  }
  const NeighborhoodGraph all = build_graph(c, 6.0);
  CHECK(all.edge_count() == 6);
}

TEST_CASE("graph invariants on a random cloud") {
  const PointCloud c = sample(SurfaceSpec::torus(), 600, 3, SamplingMode::AreaUniform);
  const double r = 0.7;
  const NeighborhoodGraph g = build_graph(c, r);
  for (std::size_t i = 0; i < g.n; ++i) {
    for (const GraphEdge& e : g.adjacency[i]) {
      CHECK(e.weight == c.distance(i, e.to));
      CHECK(e.weight <= r);
      bool back = false;
      for (const GraphEdge& f : g.adjacency[e.to]) back = back || (f.to == i && f.weight == e.weight);
      CHECK(back);
    }
    CHECK(std::is_sorted(g.adjacency[i].begin(), g.adjacency[i].end(),
                         [](const GraphEdge& a, const GraphEdge& b) { return a.to < b.to; }));
  }
  std::size_t brute = 0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    for (std::size_t j = i + 1; j < c.size(); ++j) brute += c.distance(i, j) <= r ? 1 : 0;
  }
  CHECK(g.edge_count() == brute);
}

TEST_CASE("Dijkstra agrees with Bellman-Ford on random graphs") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> w(0.01, 5.0);
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = 2 + rng() % 49;
    EdgeList edges;
    const std::size_t m = rng() % (2 * n + 1);
    for (std::size_t e = 0; e < m; ++e) {
      const std::size_t a = rng() % n, b = rng() % n;
      if (a == b) continue;
      const double weight = (t % 2 == 0) ? w(rng) : static_cast<double>(1 + rng() % 3);
      edges.push_back({{a, b}, weight});
    }
    const NeighborhoodGraph g = graph_from_edges(n, edges);
    EdgeList lighter;
    for (std::size_t a = 0; a < n; ++a) {
      for (const GraphEdge& e : g.adjacency[a]) lighter.push_back({{a, e.to}, e.weight});
    }
    for (std::size_t s = 0; s < n; s += 1 + n / 5) {
      const ShortestPathTree tree = dijkstra(g, s);
      const std::vector<double> bf = oracle::bellman_ford(n, edges, s);
      for (std::size_t v = 0; v < n; ++v) {
        if (std::isinf(bf[v])) {
          CHECK(std::isinf(tree.distance[v]));
        } else {
          CHECK(tree.distance[v] == doctest::Approx(bf[v]).epsilon(1e-12));
        }
      }
    }
  }
}

TEST_CASE("equal-length ties keep the smallest predecessor") {
  // Square 0-1-3 and 0-2-3 with unit weights: vertex 3 is reached via 1.
  const NeighborhoodGraph g = graph_from_edges(4, {{{0, 2}, 1.0}, {{2, 3}, 1.0}, {{0, 1}, 1.0}, {{1, 3}, 1.0}});
  const ShortestPathTree tree = dijkstra(g, 0);
  CHECK(tree.previous[3] == 1);
  CHECK(tree.previous[0] == 4);
  CHECK(graph_path_indices(g, 0, 3) == std::vector<std::size_t>{0, 1, 3});
  const NeighborhoodGraph dup = graph_from_edges(2, {{{0, 1}, 2.0}, {{1, 0}, 1.5}});
  REQUIRE(dup.adjacency[0].size() == 1);
  CHECK(dup.adjacency[0][0].weight == 1.5);
}

TEST_CASE("graph distances dominate chords, paths realize them, radius monotone") {
  const PointCloud c = sample(SurfaceSpec::sphere(), 800, 5, SamplingMode::AreaUniform);
  const std::vector<std::size_t> sources{0, 10, 200};
  std::vector<std::vector<double>> prev;
  for (double r : {0.2, 0.3, 0.45, 0.7}) {
    const NeighborhoodGraph g = build_graph(c, r);
    const auto d = graph_distances(g, sources);
    for (std::size_t s = 0; s < sources.size(); ++s) {
      CHECK(d[s][sources[s]] == 0.0);
      for (std::size_t j = 0; j < c.size(); ++j) {
        if (std::isinf(d[s][j])) continue;
        CHECK(d[s][j] >= c.distance(sources[s], j) - 1e-12);
        if (!prev.empty() && !std::isinf(prev[s][j])) CHECK(d[s][j] <= prev[s][j] + 1e-12);
      }
      for (std::size_t j : {1u, 77u, 500u}) {
        if (std::isinf(d[s][j])) continue;
        CHECK(polyline_length(graph_path(g, c, sources[s], j)) == doctest::Approx(d[s][j]).epsilon(1e-12));
      }
    }
    prev = d;
  }
}

TEST_CASE("distance matrix for pairs is symmetric") {
  const PointCloud c = sample(SurfaceSpec::sphere(), 400, 6, SamplingMode::AreaUniform);
  const NeighborhoodGraph g = build_graph(c, 0.5);
  const DistanceMatrix m = graph_distance_matrix(g, {{0, 5}, {5, 9}, {9, 0}, {3, 3}});
  const auto rows = graph_distances(g, {0, 5, 9});
  CHECK(m.at(0, 5) == rows[0][5]);
  CHECK(m.at(9, 5) == rows[1][9]);
  CHECK(m.at(0, 9) == doctest::Approx(rows[2][0]).epsilon(1e-12));
  CHECK(m.at(3, 3) == 0.0);
  CHECK_FALSE(m.has(1, 2));
}

TEST_CASE("flat convex cloud: intrinsic distance below graph distance") {
  const PointCloud c = sample(SurfaceSpec::flat_square(2), 600, 7, SamplingMode::AreaUniform);
  const NeighborhoodGraph g = build_graph(c, 0.15);
  REQUIRE(g.connected());
  const auto d = graph_distances(g, {0, 1, 2, 3});
  for (std::size_t s = 0; s < 4; ++s) {
    for (std::size_t j = 0; j < c.size(); ++j) CHECK(c.distance(s, j) <= d[s][j] + 1e-12);
  }
}

TEST_CASE("sphere sandwich between graph and intrinsic distances") {
  const SurfaceSpec spec = SurfaceSpec::sphere();
  const PointCloud c = sample(spec, 2000, 8, SamplingMode::AreaUniform);
  const auto truth = GroundTruthOracle::for_surface(spec);
  const NeighborhoodGraph g = build_graph(c, 0.3);
  REQUIRE(g.connected());
  const auto d = graph_distances(g, {0, 1, 2, 3, 4});
  for (std::size_t s = 0; s < 5; ++s) {
    for (std::size_t j = 5; j < c.size(); j += 7) {
      const double dm = true_distance(truth, c.point(s), c.point(j));
      const double r = 0.3;
      CHECK(dm <= (1 + r * r) * d[s][j]);
      CHECK(0.5 * d[s][j] <= dm);
    }
  }
}

}  // TEST_SUITE
