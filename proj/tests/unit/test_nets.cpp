#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "geodesy/error.hpp"
#include "geodesy/nets.hpp"
#include "geodesy/surfaces.hpp"
#include "support/oracles.hpp"

using namespace geodesy;

namespace {

PointCloud line_cloud() {
  Mat pts = Mat::Zero(11, 1);
  for (int i = 0; i <= 10; ++i) pts(i, 0) = 0.1 * i;
  return PointCloud(pts, 1);
}

PointCloud uniform_square(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Mat pts(static_cast<Eigen::Index>(n), 2);
  for (Eigen::Index i = 0; i < pts.rows(); ++i) pts.row(i) << u(rng), u(rng);
  return PointCloud(pts, 2);
}

}  // namespace

TEST_SUITE("nets") {

TEST_CASE("anchored net on a line") {
  const PointCloud c = line_cloud();
  const NetOutcome out = extract_net(c, 0.4, std::make_pair<std::size_t, std::size_t>(0, 10));
  REQUIRE(std::holds_alternative<NetResult>(out));
  const NetResult& net = std::get<NetResult>(out);
  REQUIRE(net.selected.size() >= 2);
  CHECK(net.selected[0] == 0);
  CHECK(net.selected[1] == 10);
  CHECK(net.separation == doctest::Approx(0.2));
  CHECK(oracle::min_pairwise_distance(c, net.selected) >= 0.2 - 1e-15);
  CHECK(oracle::cover_radius(c, net.selected) < 0.2);
}

TEST_CASE("close anchors short-circuit with the chord") {
  const PointCloud c = line_cloud();
  const NetOutcome out = extract_net(c, 0.4, std::make_pair<std::size_t, std::size_t>(3, 4));
  REQUIRE(std::holds_alternative<AnchorsTooClose>(out));
  CHECK(std::get<AnchorsTooClose>(out).chord == doctest::Approx(0.1));
  CHECK_THROWS_AS(extract_net(c, 0.4, std::make_pair<std::size_t, std::size_t>(2, 2)), Error);
  CHECK_THROWS_AS(extract_net(c, 0.0), Error);
}

TEST_CASE("single point net") {
  const PointCloud c(Mat::Constant(1, 3, 0.5), 2);
  const NetResult net = extract_net_plain(c, 1.0);
  REQUIRE(net.selected.size() == 1);
  CHECK(net.selected[0] == 0);
}

TEST_CASE("uniform square net against brute force") {
  const PointCloud c = uniform_square(1000, 12);
  const double eps = 0.1;
  const NetResult net = extract_net_plain(c, eps);
  CHECK(oracle::min_pairwise_distance(c, net.selected) >= eps / 2);
  CHECK(oracle::cover_radius(c, net.selected) < eps / 2);
  // Packing and covering bounds for eps/4-disks and eps/2-disks in a slightly enlarged square.
  const double pi = 3.141592653589793;
  CHECK(static_cast<double>(net.selected.size()) <= (1 + eps / 2) * (1 + eps / 2) / (pi * eps * eps / 16));
  CHECK(static_cast<double>(net.selected.size()) >= 1.0 / (pi * eps * eps / 4) * 0.9);
  CHECK(net.cover_radius_bound == doctest::Approx(1.5 * eps));
}

TEST_CASE("net is deterministic and follows index order") {
  const PointCloud c = uniform_square(500, 3);
  const NetResult a = extract_net_plain(c, 0.15), b = extract_net_plain(c, 0.15);
  CHECK(a.selected == b.selected);
  CHECK(a.selected.front() == 0);
  CHECK(std::is_sorted(a.selected.begin(), a.selected.end()));
}

TEST_CASE("grid-bucketed removal matches brute force") {
  const PointCloud big = uniform_square(12000, 5);
  const NetResult net = extract_net_plain(big, 0.05);
  std::vector<char> removed(big.size(), 0);
  std::vector<std::size_t> expected;
  for (std::size_t i = 0; i < big.size(); ++i) {
    if (removed[i]) continue;
    expected.push_back(i);
    for (std::size_t j = 0; j < big.size(); ++j) {
      if (big.distance(i, j) < 0.025) removed[j] = 1;
    }
  }
  CHECK(net.selected == expected);
}

TEST_CASE("covering radius") {
  const PointCloud c = line_cloud();
  CHECK(covering_radius(c, c) == 0.0);
  const PointCloud zero(Mat::Zero(1, 1), 1);
  Mat ref(2, 1);
  ref << 0.0, 1.0;
  CHECK(covering_radius(zero, PointCloud(ref, 1)) == doctest::Approx(1.0));
  const PointCloud grid = sample(SurfaceSpec::flat_square(2, 2), 9, 0, SamplingMode::RegularGrid);
  const PointCloud dense = uniform_square(10000, 77);
  CHECK(covering_radius(grid, dense) == doctest::Approx(std::sqrt(2.0) / 4).epsilon(0.02));
  CHECK_THROWS_AS(covering_radius(c, PointCloud(Mat::Zero(0, 1), 1)), Error);
}

TEST_CASE("resolution estimate tracks the covering radius") {
  const PointCloud c = sample(SurfaceSpec::sphere(), 2000, 4, SamplingMode::AreaUniform);
  const PointCloud dense = sample(SurfaceSpec::sphere(), 20000, 5, SamplingMode::AreaUniform);
  const double eps_hat = estimate_resolution(c);
  const double cover = covering_radius(c, dense);
  CHECK(eps_hat > 0.0);
  CHECK(eps_hat > 0.5 * cover);
  CHECK(eps_hat < 4.0 * cover);
}

TEST_CASE("resolution estimate on large clouds matches brute force") {
  for (const PointCloud& c : {sample(SurfaceSpec::sphere(), 12000, 6, SamplingMode::AreaUniform), uniform_square(15000, 7)}) {
    const std::size_t n = c.size();
    const auto rank = static_cast<std::size_t>(std::ceil(std::log(static_cast<double>(n))));
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<double> sq;
      for (std::size_t j = 0; j < n; ++j) {
        if (j != i) sq.push_back((c.point(i) - c.point(j)).squaredNorm());
      }
      std::nth_element(sq.begin(), sq.begin() + static_cast<std::ptrdiff_t>(rank - 1), sq.end());
      worst = std::max(worst, sq[rank - 1]);
    }
    CHECK(estimate_resolution(c) == doctest::Approx(std::sqrt(worst)).epsilon(1e-14));
  }
}

TEST_CASE("random clouds: separation and cover") {
  std::mt19937_64 rng(99);
  for (int t = 0; t < 30; ++t) {
    const std::size_t n = 50 + rng() % 400;
    const PointCloud c = uniform_square(n, rng());
    const double eps = 0.05 + 0.3 * std::uniform_real_distribution<double>(0, 1)(rng);
    const NetResult net = extract_net_plain(c, eps);
    CHECK(oracle::min_pairwise_distance(c, net.selected) >= eps / 2);
    CHECK(oracle::cover_radius(c, net.selected) < eps / 2);
  }
}

}  // TEST_SUITE
