#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/SVD>

#include "doctest.h"
#include "geodesy/error.hpp"
#include "geodesy/geometry.hpp"
#include "geodesy/kernels.hpp"
#include "support/oracles.hpp"

using namespace geodesy;

namespace {

Vec v2(double a, double b) { return (Vec(2) << a, b).finished(); }
Vec v3(double a, double b, double c) { return (Vec(3) << a, b, c).finished(); }

Vec gaussian(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Vec x(d);
  for (int i = 0; i < d; ++i) x(i) = g(rng);
  return x;
}

Polyline random_polyline(int d, int count, std::mt19937_64& rng) {
  Polyline p;
  for (int i = 0; i < count; ++i) p.vertices.push_back(gaussian(d, rng));
  return p;
}

Simplex regular_simplex(int k) {
  Simplex s;
  for (int i = 0; i <= k; ++i) s.vertices.push_back(Vec::Unit(k + 1, i));
  return s;
}

}  // namespace

TEST_SUITE("core-geometry") {

TEST_CASE("polyline length of simple paths") {
  CHECK(polyline_length({{v2(0, 0), v2(1, 0), v2(1, 1)}}) == doctest::Approx(2.0));
  CHECK(polyline_length({{v2(0, 0), v2(0, 0)}}) == 0.0);
  CHECK(polyline_length({{v2(0, 0), v2(3, 4)}}) == doctest::Approx(5.0));
  CHECK_THROWS_AS(polyline_length({{v2(0, 0)}}), Error);
}

TEST_CASE("polyline length dominates the endpoint chord") {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 200; ++t) {
    const Polyline p = random_polyline(3, 2 + t % 7, rng);
    CHECK(polyline_length(p) >= (p.vertices.front() - p.vertices.back()).norm() - 1e-12);
  }
}

TEST_CASE("thickness of reference simplices") {
  const Simplex equilateral{{v2(0, 0), v2(1, 0), v2(0.5, std::sqrt(3.0) / 2)}};
  CHECK(simplex_thickness(equilateral).value == doctest::Approx(std::sqrt(3.0) / 2).epsilon(1e-12));
  const Simplex right{{v2(0, 0), v2(1, 0), v2(0, 1)}};
  CHECK(simplex_thickness(right).value == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(simplex_thickness(regular_simplex(3)).value == doctest::Approx(std::sqrt(4.0 / 6.0)).epsilon(1e-12));
  CHECK(max_thickness(2) == doctest::Approx(std::sqrt(3.0) / 2));
}

TEST_CASE("degenerate simplices report zero thickness") {
  const Simplex collinear{{v2(0, 0), v2(1, 0), v2(2, 0)}};
  const Thickness t = simplex_thickness(collinear);
  CHECK(t.degenerate);
  CHECK(t.value == 0.0);
  const Simplex repeated{{v3(1, 1, 1), v3(1, 1, 1), v3(0, 0, 1)}};
  CHECK(simplex_thickness(repeated).degenerate);
}

TEST_CASE("simplex diameter is the longest edge") {
  const Simplex s{{v2(0, 0), v2(3, 0), v2(0, 4)}};
  CHECK(simplex_diameter(s) == doctest::Approx(5.0));
}

TEST_CASE("thickness maximality on random simplices") {
  std::mt19937_64 rng(11);
  for (int k : {2, 3}) {
    const double bound = std::sqrt((k + 1.0) / (2.0 * k));
    double best = 0.0;
    for (int t = 0; t < 10000; ++t) {
      Simplex s;
      for (int i = 0; i <= k; ++i) s.vertices.push_back(gaussian(k + 1, rng));
      const double tau = simplex_thickness(s).value;
      CHECK(tau <= bound + 1e-9);
      best = std::max(best, tau);
    }
    CHECK(best < bound);
    Simplex reg = regular_simplex(k);
    const Mat q = oracle::random_orthogonal(k + 1, rng);
    for (auto& v : reg.vertices) v = 2.5 * (q * v) + Vec::Ones(k + 1);
    CHECK(std::abs(simplex_thickness(reg).value - bound) < 1e-6);
  }
}

TEST_CASE("subspace angle examples") {
  const Mat xy = (Mat(3, 2) << 1, 0, 0, 1, 0, 0).finished();
  const Mat xz = (Mat(3, 2) << 1, 0, 0, 0, 0, 1).finished();
  const AffineSubspace a = make_subspace(Vec::Zero(3), xy);
  CHECK(subspace_angle(a, a) == doctest::Approx(0.0));
  CHECK(subspace_angle(a, make_subspace(Vec::Zero(3), xz)) == doctest::Approx(std::numbers::pi / 2));
  for (double theta : {0.1, 0.7, 1.3}) {
    const Mat rot = (Mat(3, 2) << 1, 0, 0, std::cos(theta), 0, std::sin(theta)).finished();
    CHECK(subspace_angle(a, make_subspace(Vec::Zero(3), rot)) == doctest::Approx(theta).epsilon(1e-12));
  }
  const AffineSubspace line = make_subspace(Vec::Zero(3), Vec::Unit(3, 0));
  CHECK_THROWS_AS(subspace_angle(a, line), Error);
}

TEST_CASE("make_subspace orthonormalizes and rejects rank deficiency") {
  const Mat dirs = (Mat(3, 2) << 1, 2, 1, 0, 0, 1).finished();
  const AffineSubspace s = make_subspace(v3(1, 2, 3), dirs);
  const Mat gram = s.basis.transpose() * s.basis;
  CHECK((gram - Mat::Identity(2, 2)).norm() < 1e-10);
  const Mat bad = (Mat(3, 2) << 1, 2, 1, 2, 0, 0).finished();
  CHECK_THROWS_AS(make_subspace(Vec::Zero(3), bad), Error);
}

TEST_CASE("point to subspace distance") {
  const AffineSubspace xy = make_subspace(Vec::Zero(3), (Mat(3, 2) << 1, 0, 0, 1, 0, 0).finished());
  CHECK(point_to_subspace_distance(v3(0, 0, 1), xy) == doctest::Approx(1.0));
  CHECK(point_to_subspace_distance(v3(5, -2, 0), xy) == doctest::Approx(0.0));
  const AffineSubspace xaxis = make_subspace(Vec::Zero(3), Vec::Unit(3, 0));
  CHECK(point_to_subspace_distance(v3(1, 1, 1), xaxis) == doctest::Approx(std::sqrt(2.0)));
  CHECK((xy.project(v3(2, 3, 4)) - v3(2, 3, 0)).norm() < 1e-14);
}

TEST_CASE("subspace angle is a metric on random subspaces") {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 500; ++t) {
    const int d = 3 + t % 3;
    const int k = 1 + t % 2;
    auto random_sub = [&] {
      Mat dirs(d, k);
      for (int c = 0; c < k; ++c) dirs.col(c) = gaussian(d, rng);
      return make_subspace(Vec::Zero(d), dirs);
    };
    const AffineSubspace a = random_sub(), b = random_sub(), c = random_sub();
    CHECK(subspace_angle(a, b) == subspace_angle(b, a));
    CHECK(subspace_angle(a, c) <= subspace_angle(a, b) + subspace_angle(b, c) + 1e-9);
  }
}

TEST_CASE("distortion of explicit maps") {
  std::vector<std::pair<Vec, Vec>> identity{{v2(0, 0), v2(0, 0)}, {v2(1, 2), v2(1, 2)}, {v2(-3, 1), v2(-3, 1)}};
  CHECK(distortion_of_map(identity) == doctest::Approx(0.0));
  std::vector<std::pair<Vec, Vec>> scaled;
  for (const auto& [x, y] : identity) scaled.emplace_back(x, 1.1 * y);
  CHECK(distortion_of_map(scaled) == doctest::Approx(0.1).epsilon(1e-12));
  std::vector<std::pair<Vec, Vec>> bent{{v2(0, 0), v2(0, 0)}, {v2(1, 0), v2(1.05, 0)}, {v2(2, 0), v2(2, 0)}};
  CHECK(distortion_of_map(bent) == doctest::Approx(0.05).epsilon(1e-12));
  std::vector<std::pair<Vec, Vec>> one{{v2(0, 0), v2(0, 0)}};
  CHECK_THROWS_AS(distortion_of_map(one), Error);
  std::vector<std::pair<Vec, Vec>> dup{{v2(0, 0), v2(0, 0)}, {v2(0, 0), v2(1, 0)}};
  CHECK_THROWS_AS(distortion_of_map(dup), Error);
}

TEST_CASE("Lipschitz maps shrink polyline length by at most L") {
  std::mt19937_64 rng(17);
  for (int t = 0; t < 300; ++t) {
    Mat a(3, 3);
    for (int c = 0; c < 3; ++c) a.col(c) = gaussian(3, rng);
    const double lip = Eigen::JacobiSVD<Mat>(a).singularValues()(0);
    const Vec b = gaussian(3, rng);
    const Polyline p = random_polyline(3, 2 + t % 9, rng);
    Polyline image;
    for (const Vec& x : p.vertices) image.vertices.push_back(a * x + b);
    CHECK(polyline_length(image) <= lip * polyline_length(p) + 1e-9);
  }
}

TEST_CASE("distortion sandwich for perturbed isometries") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  for (int t = 0; t < 300; ++t) {
    const Mat q = oracle::random_orthogonal(3, rng);
    Mat e(3, 3);
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) e(i, j) = 0.05 * unif(rng);
    }
    const Mat a = q * (Mat::Identity(3, 3) + e);
    const Polyline p = random_polyline(3, 3 + t % 6, rng);
    std::vector<std::pair<Vec, Vec>> pairs;
    Polyline image;
    for (const Vec& x : p.vertices) {
      image.vertices.push_back(a * x);
      pairs.emplace_back(x, a * x);
    }
    // Distortion of a linear map over all point pairs, from its extreme singular values.
    const Vec sv = Eigen::JacobiSVD<Mat>(a).singularValues();
    const double xi = std::max(sv(0) - 1.0, 1.0 - sv(2));
    REQUIRE(xi < 1.0);
    CHECK(distortion_of_map(pairs) <= xi + 1e-12);
    const double l = polyline_length(p), lf = polyline_length(image);
    CHECK(std::abs(lf - l) <= xi * l + 1e-9);
    CHECK(std::abs(lf - l) <= xi / (1.0 - xi) * lf + 1e-9);
  }
}

TEST_CASE("dist_angle bound for intersecting subspaces") {
  std::mt19937_64 rng(29);
  for (int t = 0; t < 1000; ++t) {
    const int d = 3 + t % 2;
    const int k = 1 + t % 2;
    const Vec p = gaussian(d, rng);
    Mat da(d, k), db(d, k);
    for (int c = 0; c < k; ++c) {
      da.col(c) = gaussian(d, rng);
      db.col(c) = gaussian(d, rng);
    }
    if (k == 2) db.col(0) = da.col(0);  // the planes meet in a line
    const AffineSubspace a = make_subspace(p, da), b = make_subspace(p, db);
    const Vec x = gaussian(d, rng) * 2.0;
    double to_intersection = (x - p).norm();
    if (k == 2) to_intersection = point_to_subspace_distance(x, make_subspace(p, da.col(0)));
    const double lhs = std::abs(point_to_subspace_distance(x, a) - point_to_subspace_distance(x, b));
    CHECK(lhs <= std::sin(subspace_angle(a, b)) * to_intersection + 1e-9);
    CHECK(lhs <= subspace_angle(a, b) * to_intersection + 1e-9);
  }
}

}  // TEST_SUITE

TEST_SUITE("kernels") {

TEST_CASE("scalar and vectorized kernels agree bitwise") {
  std::mt19937_64 rng(31);
  std::normal_distribution<double> g;
  for (std::size_t n : {0u, 1u, 3u, 4u, 7u, 64u, 1001u}) {
    for (int d : {1, 2, 3, 5, 11}) {
      std::vector<std::vector<double>> cols(static_cast<std::size_t>(d), std::vector<double>(n));
      for (auto& c : cols) {
        for (double& x : c) x = g(rng) * 10.0;
      }
      std::vector<const double*> ptrs;
      for (auto& c : cols) ptrs.push_back(c.data());
      const kernels::ColumnView view{ptrs, n};
      std::vector<double> q(static_cast<std::size_t>(d));
      for (double& x : q) x = g(rng);

      std::vector<double> ref(n), dispatched(n), mins_ref(n, 4.0), mins(n, 4.0);
      kernels::scalar::squared_distances(view, q, ref);
      kernels::squared_distances(view, q, dispatched);
      kernels::scalar::min_squared_distances(view, q, mins_ref);
      kernels::min_squared_distances(view, q, mins);
      for (std::size_t j = 0; j < n; ++j) {
        double expected = 0.0;
        for (int c = 0; c < d; ++c) {
          const double diff = cols[static_cast<std::size_t>(c)][j] - q[static_cast<std::size_t>(c)];
          expected += diff * diff;
        }
        CHECK(ref[j] == doctest::Approx(expected).epsilon(1e-14));
        CHECK(dispatched[j] == ref[j]);
        CHECK(mins[j] == mins_ref[j]);
        CHECK(mins_ref[j] == std::min(4.0, ref[j]));
      }
#if defined(__x86_64__) || defined(_M_X64)
      if (kernels::isa_supported(kernels::Isa::Avx2)) {
        std::vector<double> wide(n), wide_mins(n, 4.0);
        kernels::avx2::squared_distances(view, q, wide);
        kernels::avx2::min_squared_distances(view, q, wide_mins);
        for (std::size_t j = 0; j < n; ++j) {
          CHECK(wide[j] == ref[j]);
          CHECK(wide_mins[j] == mins_ref[j]);
        }
      }
#endif
#if defined(__aarch64__)
      std::vector<double> wide(n), wide_mins(n, 4.0);
      kernels::neon::squared_distances(view, q, wide);
      kernels::neon::min_squared_distances(view, q, wide_mins);
      for (std::size_t j = 0; j < n; ++j) {
        CHECK(wide[j] == ref[j]);
        CHECK(wide_mins[j] == mins_ref[j]);
      }
#endif
    }
  }
}

TEST_CASE("forcing the scalar path changes the active ISA") {
  const kernels::Isa before = kernels::active_isa();
  kernels::force_isa(kernels::Isa::Scalar);
  CHECK(kernels::active_isa() == kernels::Isa::Scalar);
  CHECK(std::string(kernels::isa_name(kernels::Isa::Scalar)) == "scalar");
  kernels::force_isa(before);
  CHECK(kernels::active_isa() == before);
}

}  // TEST_SUITE
