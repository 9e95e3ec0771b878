#include "geodesy/surfaces.hpp"

#include <Eigen/Geometry>
#include <algorithm>
#include <array>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "geodesy/error.hpp"

namespace geodesy {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2 * std::numbers::pi;

double unit_uniform(std::mt19937_64& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

Vec torus_point(const SurfaceSpec& s, double u, double v) {
  Vec p(3);
  p << std::cos(u) * (s.major_radius + s.minor_radius * std::cos(v)),
      std::sin(u) * (s.major_radius + s.minor_radius * std::cos(v)), s.minor_radius * std::sin(v);
  return p;
}

Vec swiss_point(double u, double v) {
  Vec p(3);
  p << u * std::cos(u), u * std::sin(u), v;
  return p;
}

// Parameters (u, v) of a point on the torus.
std::array<double, 2> torus_params(const SurfaceSpec& s, const Vec& x) {
  const double rho = std::hypot(x(0), x(1));
  return {std::atan2(x(1), x(0)), std::atan2(x(2), rho - s.major_radius)};
}

std::size_t integer_root(std::size_t n, int k) {
  auto m = static_cast<std::size_t>(std::llround(std::pow(static_cast<double>(n), 1.0 / k)));
  for (std::size_t cand : {m > 0 ? m - 1 : 0, m, m + 1}) {
    std::size_t p = 1;
    for (int q = 0; q < k; ++q) p *= cand;
    if (p == n) return cand;
  }
  return 0;
}

}  // namespace

SurfaceSpec SurfaceSpec::sphere(double radius) {
  SurfaceSpec s;
  s.kind = SurfaceKind::Sphere;
  s.radius = radius;
  return s;
}

SurfaceSpec SurfaceSpec::torus(double major, double minor) {
  SurfaceSpec s;
  s.kind = SurfaceKind::Torus;
  s.major_radius = major;
  s.minor_radius = minor;
  return s;
}

SurfaceSpec SurfaceSpec::swiss_roll() {
  SurfaceSpec s;
  s.kind = SurfaceKind::SwissRoll;
  return s;
}

SurfaceSpec SurfaceSpec::flat_square(int k, int ambient) {
  SurfaceSpec s;
  s.kind = SurfaceKind::FlatSquare;
  s.k = k;
  s.ambient = ambient;
  return s;
}

SurfaceSpec SurfaceSpec::bumped_grid(int k, double amplitude, int m) {
  SurfaceSpec s;
  s.kind = SurfaceKind::BumpedGrid;
  s.k = k;
  s.amplitude = amplitude;
  s.grid = m;
  s.ambient = k + 1;
  return s;
}

int SurfaceSpec::intrinsic_dim() const {
  switch (kind) {
    case SurfaceKind::FlatSquare:
    case SurfaceKind::BumpedGrid:
      return k;
    default:
      return 2;
  }
}

int SurfaceSpec::ambient_dim() const {
  switch (kind) {
    case SurfaceKind::FlatSquare:
    case SurfaceKind::BumpedGrid:
      return ambient;
    default:
      return 3;
  }
}

double SurfaceSpec::grid_spacing() const { return 1.0 / (grid - 1); }

std::string SurfaceSpec::name() const {
  switch (kind) {
    case SurfaceKind::Sphere:
      return "sphere";
    case SurfaceKind::Torus:
      return "torus";
    case SurfaceKind::SwissRoll:
      return "swiss";
    case SurfaceKind::FlatSquare:
      return "flat";
    case SurfaceKind::BumpedGrid:
      return "bumped";
  }
  return "unknown";
}

SurfaceSpec parse_surface(const std::string& name) {
  if (name == "sphere") return SurfaceSpec::sphere();
  if (name == "torus") return SurfaceSpec::torus();
  if (name == "swiss" || name == "swiss_roll" || name == "swissroll") return SurfaceSpec::swiss_roll();
  if (name == "flat" || name == "square") return SurfaceSpec::flat_square();
  if (name == "bumped") return SurfaceSpec::bumped_grid(2, 1.0, 11);
  invalid_input("unknown surface '" + name + "'");
}

SamplingMode parse_sampling_mode(const std::string& name) {
  if (name == "param") return SamplingMode::ParamUniform;
  if (name == "area") return SamplingMode::AreaUniform;
  if (name == "grid") return SamplingMode::RegularGrid;
  invalid_input("unknown sampling mode '" + name + "'");
}

PointCloud sample(const SurfaceSpec& spec, std::size_t n, std::uint64_t seed, SamplingMode mode) {
  const int k = spec.intrinsic_dim();
  const int d = spec.ambient_dim();
  if (n < static_cast<std::size_t>(k + 2)) invalid_input("sample size must be at least k+2");
  if (d < k || (spec.kind == SurfaceKind::BumpedGrid && d < k + 1)) invalid_input("ambient dimension too small");
  std::mt19937_64 rng(seed);
  Mat pts = Mat::Zero(static_cast<Eigen::Index>(n), d);
  const bool flat_like = spec.kind == SurfaceKind::FlatSquare || spec.kind == SurfaceKind::BumpedGrid;

  if (mode == SamplingMode::RegularGrid) {
    if (!flat_like) invalid_input("regular-grid sampling is only defined for flat and bumped surfaces");
    const std::size_t m = integer_root(n, k);
    if (m < 2) invalid_input("regular-grid sampling needs n to be a perfect k-th power");
    if (spec.kind == SurfaceKind::BumpedGrid && static_cast<int>(m) != spec.grid) {
      invalid_input("regular-grid sample size must equal m^k for the bumped surface");
    }
    const double eps = 1.0 / static_cast<double>(m - 1);
    for (std::size_t r = 0; r < n; ++r) {
      std::size_t rest = r;
      for (int q = 0; q < k; ++q) {
        pts(static_cast<Eigen::Index>(r), q) = static_cast<double>(rest % m) * eps;
        rest /= m;
      }
    }
    return PointCloud(std::move(pts), k);
  }

  for (std::size_t i = 0; i < n; ++i) {
    const auto row = static_cast<Eigen::Index>(i);
    switch (spec.kind) {
      case SurfaceKind::Sphere: {
        if (mode == SamplingMode::AreaUniform) {
          std::normal_distribution<double> g(0.0, 1.0);
          Eigen::Vector3d v;
          do {
            v << g(rng), g(rng), g(rng);
          } while (v.norm() < 1e-12);
          pts.row(row) = (spec.radius / v.norm()) * v.transpose();
        } else {
          // The customary (u, v) in [0, 2pi) x [0, pi) map; it only covers the upper hemisphere.
          const double u = kTwoPi * unit_uniform(rng);
          const double v = kPi * unit_uniform(rng);
          pts.row(row) << spec.radius * std::cos(u) * std::cos(v), spec.radius * std::sin(u) * std::cos(v),
              spec.radius * std::sin(v);
        }
        break;
      }
      case SurfaceKind::Torus: {
        const double u = kTwoPi * unit_uniform(rng);
        double v = kTwoPi * unit_uniform(rng);
        if (mode == SamplingMode::AreaUniform) {
          // Area element is proportional to R + r cos v.
          const double top = spec.major_radius + spec.minor_radius;
          while (unit_uniform(rng) * top > spec.major_radius + spec.minor_radius * std::cos(v)) {
            v = kTwoPi * unit_uniform(rng);
          }
        }
        pts.row(row) = torus_point(spec, u, v).transpose();
        break;
      }
      case SurfaceKind::SwissRoll: {
        double u = spec.u_min + (spec.u_max - spec.u_min) * unit_uniform(rng);
        const double v = spec.height * unit_uniform(rng);
        if (mode == SamplingMode::AreaUniform) {
          const double top = std::sqrt(1 + spec.u_max * spec.u_max);
          while (unit_uniform(rng) * top > std::sqrt(1 + u * u)) {
            u = spec.u_min + (spec.u_max - spec.u_min) * unit_uniform(rng);
          }
        }
        pts.row(row) = swiss_point(u, v).transpose();
        break;
      }
      case SurfaceKind::FlatSquare: {
        for (int q = 0; q < k; ++q) pts(row, q) = unit_uniform(rng);
        break;
      }
      case SurfaceKind::BumpedGrid: {
        for (int q = 0; q < k; ++q) pts(row, q) = unit_uniform(rng);
        pts(row, k) = bump_height(spec.amplitude, spec.grid_spacing(), pts(row, k - 1));
        break;
      }
    }
  }
  return PointCloud(std::move(pts), k);
}

double surface_residual(const SurfaceSpec& spec, const Vec& x) {
  if (x.size() != spec.ambient_dim()) return std::numeric_limits<double>::infinity();
  switch (spec.kind) {
    case SurfaceKind::Sphere:
      return std::abs(x.norm() - spec.radius);
    case SurfaceKind::Torus: {
      const double rho = std::hypot(x(0), x(1));
      return std::abs(std::hypot(rho - spec.major_radius, x(2)) - spec.minor_radius);
    }
    case SurfaceKind::SwissRoll: {
      const double u = std::hypot(x(0), x(1));
      double r = std::hypot(u * std::cos(u) - x(0), u * std::sin(u) - x(1));
      r += std::max(0.0, spec.u_min - u) + std::max(0.0, u - spec.u_max);
      r += std::max(0.0, -x(2)) + std::max(0.0, x(2) - spec.height);
      return r;
    }
    case SurfaceKind::FlatSquare:
    case SurfaceKind::BumpedGrid: {
      double r = 0.0;
      for (int q = 0; q < spec.k; ++q) r += std::max(0.0, -x(q)) + std::max(0.0, x(q) - 1.0);
      int first_free = spec.k;
      if (spec.kind == SurfaceKind::BumpedGrid) {
        r += std::abs(x(spec.k) - bump_height(spec.amplitude, spec.grid_spacing(), std::clamp(x(spec.k - 1), 0.0, 1.0)));
        first_free = spec.k + 1;
      }
      for (int q = first_free; q < x.size(); ++q) r += std::abs(x(q));
      return r;
    }
  }
  return std::numeric_limits<double>::infinity();
}

double distance_to_surface(const SurfaceSpec& spec, const Vec& x) {
  switch (spec.kind) {
    case SurfaceKind::Sphere:
      return std::abs(x.norm() - spec.radius);
    case SurfaceKind::Torus: {
      const double rho = std::hypot(x(0), x(1));
      return std::abs(std::hypot(rho - spec.major_radius, x(2)) - spec.minor_radius);
    }
    case SurfaceKind::FlatSquare:
      return (x - project_to_surface(spec, x)).norm();
    case SurfaceKind::SwissRoll: {
      // Coarse scan of the spiral followed by Newton refinement on the squared planar distance.
      auto sq = [&](double u) { return std::pow(u * std::cos(u) - x(0), 2) + std::pow(u * std::sin(u) - x(1), 2); };
      constexpr int kScan = 2000;
      double best_u = spec.u_min;
      double best = sq(best_u);
      for (int i = 1; i <= kScan; ++i) {
        const double u = spec.u_min + (spec.u_max - spec.u_min) * i / kScan;
        if (const double v = sq(u); v < best) {
          best = v;
          best_u = u;
        }
      }
      double u = best_u;
      for (int it = 0; it < 30; ++it) {
        const double c = std::cos(u), s = std::sin(u);
        const double px = u * c - x(0), py = u * s - x(1);
        const double dx = c - u * s, dy = s + u * c;
        const double ddx = -2 * s - u * c, ddy = 2 * c - u * s;
        const double g = px * dx + py * dy;
        const double h = dx * dx + dy * dy + px * ddx + py * ddy;
        if (h <= 0) break;
        const double next = std::clamp(u - g / h, spec.u_min, spec.u_max);
        if (std::abs(next - u) < 1e-15) break;
        u = next;
      }
      const double planar = std::sqrt(std::min(sq(u), best));
      const double dz = std::max({0.0, -x(2), x(2) - spec.height});
      return std::hypot(planar, dz);
    }
    case SurfaceKind::BumpedGrid:
      invalid_input("distance_to_surface is not available for the bumped surface");
  }
  return std::numeric_limits<double>::infinity();
}

Vec project_to_surface(const SurfaceSpec& spec, const Vec& x) {
  switch (spec.kind) {
    case SurfaceKind::Sphere: {
      const double norm = x.norm();
      if (norm == 0.0) {
        Vec p = Vec::Zero(3);
        p(0) = spec.radius;
        return p;
      }
      return (spec.radius / norm) * x;
    }
    case SurfaceKind::Torus: {
      const double rho = std::hypot(x(0), x(1));
      Eigen::Vector3d dir(1.0, 0.0, 0.0);
      if (rho > 0.0) dir << x(0) / rho, x(1) / rho, 0.0;
      const Eigen::Vector3d center = spec.major_radius * dir;
      Eigen::Vector3d w = Eigen::Vector3d(x(0), x(1), x(2)) - center;
      const double wn = w.norm();
      if (wn == 0.0) {
        w = dir;
      } else {
        w /= wn;
      }
      return center + spec.minor_radius * w;
    }
    case SurfaceKind::FlatSquare: {
      Vec p = Vec::Zero(x.size());
      for (int q = 0; q < spec.k; ++q) p(q) = std::clamp(x(q), 0.0, 1.0);
      return p;
    }
    default:
      invalid_input("projection is not available for surface '" + spec.name() + "'");
  }
}

AffineSubspace analytic_tangent(const SurfaceSpec& spec, const Vec& x) {
  Mat dirs(spec.ambient_dim(), spec.intrinsic_dim());
  switch (spec.kind) {
    case SurfaceKind::Sphere: {
      const Eigen::Vector3d n = Eigen::Vector3d(x(0), x(1), x(2)).normalized();
      const Eigen::Vector3d helper = std::abs(n(0)) < 0.9 ? Eigen::Vector3d::UnitX() : Eigen::Vector3d::UnitY();
      const Eigen::Vector3d a = n.cross(helper).normalized();
      dirs.col(0) = a;
      dirs.col(1) = n.cross(a);
      break;
    }
    case SurfaceKind::Torus: {
      const auto [u, v] = torus_params(spec, x);
      dirs.col(0) << -std::sin(u), std::cos(u), 0.0;
      dirs.col(1) << -std::cos(u) * std::sin(v), -std::sin(u) * std::sin(v), std::cos(v);
      break;
    }
    case SurfaceKind::SwissRoll: {
      const double u = std::hypot(x(0), x(1));
      dirs.col(0) << std::cos(u) - u * std::sin(u), std::sin(u) + u * std::cos(u), 0.0;
      dirs.col(1) << 0.0, 0.0, 1.0;
      break;
    }
    case SurfaceKind::FlatSquare:
      dirs.setZero();
      for (int q = 0; q < spec.k; ++q) dirs(q, q) = 1.0;
      break;
    case SurfaceKind::BumpedGrid:
      invalid_input("analytic tangents are not available for the bumped surface");
  }
  return make_subspace(x, dirs);
}

double swiss_arc_length(double u) { return 0.5 * u * std::sqrt(1 + u * u) + 0.5 * std::asinh(u); }

double swiss_inverse_arc_length(double s) {
  if (s <= 0.0) return 0.0;
  double u = std::sqrt(2 * s);
  for (int it = 0; it < 100; ++it) {
    const double step = (swiss_arc_length(u) - s) / std::sqrt(1 + u * u);
    u -= step;
    if (std::abs(step) <= 1e-14 * std::max(1.0, u)) break;
  }
  return u;
}

Vec isometric_coords(const SurfaceSpec& spec, const Vec& x) {
  switch (spec.kind) {
    case SurfaceKind::SwissRoll: {
      Vec c(2);
      c << swiss_arc_length(std::hypot(x(0), x(1))), x(2);
      return c;
    }
    case SurfaceKind::FlatSquare:
      return x.head(spec.k);
    case SurfaceKind::BumpedGrid: {
      Vec c = x.head(spec.k);
      c(spec.k - 1) = bump_arc_length_to(spec.amplitude, spec.grid_spacing(), x(spec.k - 1));
      return c;
    }
    default:
      invalid_input("surface '" + spec.name() + "' has no global isometric coordinates");
  }
}

double boundary_distance(const SurfaceSpec& spec, const Vec& x) {
  switch (spec.kind) {
    case SurfaceKind::SwissRoll: {
      const Vec c = isometric_coords(spec, x);
      const double s0 = swiss_arc_length(spec.u_min), s1 = swiss_arc_length(spec.u_max);
      return std::min({c(0) - s0, s1 - c(0), c(1), spec.height - c(1)});
    }
    case SurfaceKind::FlatSquare:
    case SurfaceKind::BumpedGrid: {
      double b = std::numeric_limits<double>::infinity();
      for (int q = 0; q < spec.k; ++q) b = std::min({b, x(q), 1.0 - x(q)});
      return b;
    }
    default:
      return std::numeric_limits<double>::infinity();
  }
}

GroundTruthOracle GroundTruthOracle::for_surface(const SurfaceSpec& spec) {
  GroundTruthOracle o;
  o.spec = spec;
  switch (spec.kind) {
    case SurfaceKind::Torus:
      o.method = OracleMethod::MidpointRefinement;
      break;
    case SurfaceKind::SwissRoll:
      o.method = OracleMethod::NewtonInversion;
      break;
    default:
      o.method = OracleMethod::ClosedForm;
  }
  return o;
}

namespace {

using P2 = Eigen::Vector2d;
using P3 = Eigen::Vector3d;
using J32 = Eigen::Matrix<double, 3, 2>;
using M2 = Eigen::Matrix2d;

P3 torus_map(const SurfaceSpec& s, const P2& q) {
  const double a = s.major_radius + s.minor_radius * std::cos(q(1));
  return {a * std::cos(q(0)), a * std::sin(q(0)), s.minor_radius * std::sin(q(1))};
}

J32 torus_jacobian(const SurfaceSpec& s, const P2& q) {
  const double a = s.major_radius + s.minor_radius * std::cos(q(1));
  const double cu = std::cos(q(0)), su = std::sin(q(0)), sv = std::sin(q(1)), cv = std::cos(q(1));
  J32 j;
  j << -a * su, -s.minor_radius * sv * cu, a * cu, -s.minor_radius * sv * su, 0.0, s.minor_radius * cv;
  return j;
}

// Residual-weighted second derivatives of the torus map: sum_c r_c * Hessian of component c.
M2 torus_curvature_term(const SurfaceSpec& s, const P2& q, const P3& r) {
  const double a = s.major_radius + s.minor_radius * std::cos(q(1));
  const double cu = std::cos(q(0)), su = std::sin(q(0)), sv = std::sin(q(1)), cv = std::cos(q(1));
  const P3 uu(-a * cu, -a * su, 0.0);
  const P3 uv(s.minor_radius * sv * su, -s.minor_radius * sv * cu, 0.0);
  const P3 vv(-s.minor_radius * cv * cu, -s.minor_radius * cv * su, -s.minor_radius * sv);
  M2 m;
  m << r.dot(uu), r.dot(uv), r.dot(uv), r.dot(vv);
  return m;
}

// A path on the torus in unwrapped parameters; the endpoints are pinned to the given points.
struct TorusPath {
  std::vector<P2> q;
  P3 first;
  P3 last;

  P3 point(const SurfaceSpec& s, std::size_t i) const {
    if (i == 0) return first;
    if (i + 1 == q.size()) return last;
    return torus_map(s, q[i]);
  }

  double length(const SurfaceSpec& s) const {
    double total = 0.0;
    P3 prev = first;
    for (std::size_t i = 1; i < q.size(); ++i) {
      const P3 cur = point(s, i);
      total += (cur - prev).norm();
      prev = cur;
    }
    return total;
  }

  double energy(const SurfaceSpec& s) const {
    double total = 0.0;
    P3 prev = first;
    for (std::size_t i = 1; i < q.size(); ++i) {
      const P3 cur = point(s, i);
      total += (cur - prev).squaredNorm();
      prev = cur;
    }
    return total;
  }
};

TorusPath torus_path(const SurfaceSpec& s, const Polyline& initial) {
  TorusPath path;
  path.first = P3(initial.vertices.front()(0), initial.vertices.front()(1), initial.vertices.front()(2));
  path.last = P3(initial.vertices.back()(0), initial.vertices.back()(1), initial.vertices.back()(2));
  for (const Vec& v : initial.vertices) {
    const auto [u, w] = torus_params(s, v);
    P2 q(u, w);
    if (!path.q.empty()) {
      const P2& prev = path.q.back();
      q(0) = prev(0) + std::remainder(q(0) - prev(0), kTwoPi);
      q(1) = prev(1) + std::remainder(q(1) - prev(1), kTwoPi);
    }
    path.q.push_back(q);
  }
  return path;
}

// Minimizes the discrete energy sum |p_{i+1} - p_i|^2 over the interior parameters by damped
// Newton steps; the normal equations are block tridiagonal and solved by block elimination.
void minimize_energy(const SurfaceSpec& s, TorusPath& path) {
  const std::size_t n = path.q.size();
  if (n < 3) return;
  std::vector<P3> p(n);
  std::vector<J32> jac(n);
  std::vector<M2> diag(n), upper(n), modified(n);
  std::vector<P2> rhs(n), step(n);
  double energy = path.energy(s);
  for (int iter = 0; iter < 100; ++iter) {
    for (std::size_t i = 0; i < n; ++i) {
      p[i] = path.point(s, i);
      jac[i] = torus_jacobian(s, path.q[i]);
    }
    // Newton step when the block tridiagonal Hessian is positive definite, Gauss-Newton otherwise.
    for (bool newton : {true, false}) {
      for (std::size_t i = 1; i + 1 < n; ++i) {
        diag[i] = 2.0 * jac[i].transpose() * jac[i];
        if (newton) diag[i] += torus_curvature_term(s, path.q[i], 2.0 * p[i] - p[i - 1] - p[i + 1]);
        upper[i] = -(jac[i].transpose() * jac[i + 1]);
        rhs[i] = jac[i].transpose() * ((p[i + 1] - p[i]) - (p[i] - p[i - 1]));
      }
      bool definite = true;
      modified[1] = diag[1];
      for (std::size_t i = 2; i + 1 < n; ++i) {
        const M2 factor = upper[i - 1].transpose() * modified[i - 1].inverse();
        modified[i] = diag[i] - factor * upper[i - 1];
        rhs[i] -= factor * rhs[i - 1];
      }
      for (std::size_t i = 1; i + 1 < n; ++i) definite = definite && modified[i](0, 0) > 0.0 && modified[i].determinant() > 0.0;
      if (definite || !newton) break;
    }
    step[n - 2] = modified[n - 2].inverse() * rhs[n - 2];
    for (std::size_t i = n - 3; i >= 1; --i) step[i] = modified[i].inverse() * (rhs[i] - upper[i] * step[i + 1]);

    double largest = 0.0;
    for (std::size_t i = 1; i + 1 < n; ++i) largest = std::max(largest, step[i].cwiseAbs().maxCoeff());
    const std::vector<P2> saved = path.q;
    double scale = 1.0;
    double trial = energy;
    for (int halving = 0; halving < 30; ++halving) {
      for (std::size_t i = 1; i + 1 < n; ++i) path.q[i] = saved[i] + scale * step[i];
      trial = path.energy(s);
      if (trial <= energy) break;
      scale *= 0.5;
    }
    if (trial > energy) {
      path.q = saved;
      break;
    }
    const double decrease = energy - trial;
    energy = trial;
    if (largest < 1e-10 || decrease <= 1e-15 * energy) break;
  }
}

TorusPath bisect(const TorusPath& path) {
  TorusPath finer;
  finer.first = path.first;
  finer.last = path.last;
  finer.q.reserve(2 * path.q.size() - 1);
  for (std::size_t i = 0; i + 1 < path.q.size(); ++i) {
    finer.q.push_back(path.q[i]);
    finer.q.push_back(0.5 * (path.q[i] + path.q[i + 1]));
  }
  finer.q.push_back(path.q.back());
  return finer;
}

RefinementResult refine_torus_path(const GroundTruthOracle& oracle, TorusPath path) {
  const SurfaceSpec& s = oracle.spec;
  RefinementResult result;
  double prev = path.length(s);
  for (int it = 1; it <= oracle.max_iters; ++it) {
    if (2 * (path.q.size() - 1) > oracle.max_segments) break;
    path = bisect(path);
    minimize_energy(s, path);
    const double len = path.length(s);
    result.iterations = it;
    const bool done = std::abs(len - prev) <= oracle.tolerance * len;
    prev = len;
    if (done) {
      result.converged = true;
      break;
    }
  }
  result.length = prev;
  result.path.vertices.reserve(path.q.size());
  for (std::size_t i = 0; i < path.q.size(); ++i) result.path.vertices.emplace_back(path.point(s, i));
  return result;
}

TorusPath relaxed_start(const GroundTruthOracle& oracle, const Polyline& initial) {
  TorusPath path = torus_path(oracle.spec, initial);
  minimize_energy(oracle.spec, path);
  return path;
}

}  // namespace

RefinementResult refine_geodesic(const GroundTruthOracle& oracle, const Polyline& initial) {
  if (initial.vertices.size() < 2) invalid_input("refinement needs an initial path with two or more vertices");
  if (oracle.spec.kind != SurfaceKind::Torus) invalid_input("midpoint refinement is implemented for the torus");
  return refine_torus_path(oracle, relaxed_start(oracle, initial));
}

namespace {

void require_on_surface(const SurfaceSpec& spec, const Vec& x) {
  const double tol = 1e-9 * std::max(1.0, x.norm());
  if (!(surface_residual(spec, x) <= tol)) invalid_input("point is not on the surface");
}

double wrap_angle(double a) {
  a = std::remainder(a, kTwoPi);
  return a;
}

}  // namespace

double true_distance(const GroundTruthOracle& oracle, const Vec& x, const Vec& y, const Polyline* initial) {
  const SurfaceSpec& spec = oracle.spec;
  require_on_surface(spec, x);
  require_on_surface(spec, y);
  switch (spec.kind) {
    case SurfaceKind::Sphere: {
      const Eigen::Vector3d a(x(0), x(1), x(2)), b(y(0), y(1), y(2));
      // Same angle as arccos(<x,y>/R^2) but accurate for nearby points.
      return spec.radius * std::atan2(a.cross(b).norm(), a.dot(b));
    }
    case SurfaceKind::SwissRoll:
    case SurfaceKind::BumpedGrid:
    case SurfaceKind::FlatSquare:
      return (isometric_coords(spec, x) - isometric_coords(spec, y)).norm();
    case SurfaceKind::Torus: {
      if ((x - y).norm() == 0.0) return 0.0;
      std::vector<Polyline> starts;
      if (initial != nullptr) {
        starts.push_back(*initial);
        starts.back().vertices.front() = x;
        starts.back().vertices.back() = y;
      } else {
        // Straight lines in parameter space for each choice of wrap direction.
        const auto [u0, v0] = torus_params(spec, x);
        const auto [u1, v1] = torus_params(spec, y);
        const double du = wrap_angle(u1 - u0), dv = wrap_angle(v1 - v0);
        for (double du_opt : {du, du - std::copysign(kTwoPi, du)}) {
          for (double dv_opt : {dv, dv - std::copysign(kTwoPi, dv)}) {
            Polyline line;
            constexpr int kSteps = 16;
            for (int t = 0; t <= kSteps; ++t) {
              const double f = static_cast<double>(t) / kSteps;
              line.vertices.push_back(torus_point(spec, u0 + f * du_opt, v0 + f * dv_opt));
            }
            line.vertices.front() = x;
            line.vertices.back() = y;
            starts.push_back(std::move(line));
          }
        }
      }
      // Only starts whose relaxed coarse length is within 10% of the shortest are refined further.
      std::vector<TorusPath> relaxed;
      double coarse_best = std::numeric_limits<double>::infinity();
      for (const Polyline& start : starts) {
        relaxed.push_back(relaxed_start(oracle, start));
        coarse_best = std::min(coarse_best, relaxed.back().length(spec));
      }
      double best = std::numeric_limits<double>::infinity();
      bool converged = true;
      for (TorusPath& start : relaxed) {
        if (start.length(spec) > 1.1 * coarse_best) continue;
        const RefinementResult r = refine_torus_path(oracle, std::move(start));
        if (r.length < best) {
          best = r.length;
          converged = r.converged;
        }
      }
      if (!converged) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "torus midpoint refinement did not converge; best value " << best;
        throw Error(ErrorCode::ConvergenceFailure, msg.str());
      }
      return best;
    }
  }
  return std::numeric_limits<double>::infinity();
}

double tricube(double t) {
  const double a = 1.0 - std::pow(std::abs(t), 3);
  return a > 0.0 ? a * a * a : 0.0;
}

double tricube_derivative(double t) {
  const double at = std::abs(t);
  if (at >= 1.0) return 0.0;
  const double a = 1.0 - at * at * at;
  return -9.0 * t * at * a * a;
}

namespace {

// Arc length of the single bump over [0, t], t in [0, eps].
double bump_arc_partial(double amplitude, double eps, double t) {
  if (t <= 0.0) return 0.0;
  if (amplitude == 0.0) return t;
  const double half = eps / 2;
  auto integrand = [&](double s) {
    const double slope = amplitude * half * tricube_derivative(s / half - 1.0);
    return std::sqrt(1.0 + slope * slope);
  };
  double err = 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(integrand, 0.0, t, 20, 1e-12, &err);
}

}  // namespace

double bump_arc_length(double amplitude, double eps) {
  if (eps <= 0.0) invalid_input("bump width must be positive");
  if (amplitude == 0.0) return eps;
  return bump_arc_partial(amplitude, eps, eps);
}

double bump_height(double amplitude, double eps, double t) {
  const int cells = static_cast<int>(std::llround(1.0 / eps));
  int i = std::clamp(static_cast<int>(std::floor(t / eps)), 0, std::max(0, cells - 1));
  const double half = eps / 2;
  return amplitude * half * half * tricube((t - (i + 0.5) * eps) / half);
}

double bump_arc_length_to(double amplitude, double eps, double t) {
  const int cells = static_cast<int>(std::llround(1.0 / eps));
  int i = std::clamp(static_cast<int>(std::floor(t / eps)), 0, std::max(0, cells - 1));
  const double local = t - i * eps;
  if (std::abs(local) < 1e-14) return i * bump_arc_length(amplitude, eps);
  return i * bump_arc_length(amplitude, eps) + bump_arc_partial(amplitude, eps, local);
}

LowerBoundPair lower_bound_pair(int k, int m, double amplitude) {
  if (m < 3) invalid_input("lower-bound grid needs m >= 3");
  if (k < 1) invalid_input("lower-bound construction needs k >= 1");
  LowerBoundPair out;
  out.eps = 1.0 / (m - 1);
  out.eta = bump_arc_length(amplitude, out.eps);
  std::size_t n = 1;
  for (int q = 0; q < k; ++q) n *= static_cast<std::size_t>(m);

  Mat pts = Mat::Zero(static_cast<Eigen::Index>(n), k + 1);
  Mat u1(static_cast<Eigen::Index>(n), k), u2(static_cast<Eigen::Index>(n), k);
  out.grid_index.resize(n);
  for (std::size_t r = 0; r < n; ++r) {
    std::size_t rest = r;
    auto& idx = out.grid_index[r];
    idx.resize(static_cast<std::size_t>(k));
    for (int q = 0; q < k; ++q) {
      idx[static_cast<std::size_t>(q)] = static_cast<int>(rest % static_cast<std::size_t>(m));
      rest /= static_cast<std::size_t>(m);
      pts(static_cast<Eigen::Index>(r), q) = idx[static_cast<std::size_t>(q)] * out.eps;
    }
    const auto row = static_cast<Eigen::Index>(r);
    u1.row(row) = pts.row(row).head(k);
    u2.row(row) = pts.row(row).head(k);
    u2(row, k - 1) = idx[static_cast<std::size_t>(k - 1)] * out.eta;
  }
  out.cloud = PointCloud(pts, k);
  out.d1 = DistanceMatrix(n);
  out.d2 = DistanceMatrix(n);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      double flat = 0.0, bent = 0.0;
      for (int q = 0; q < k; ++q) {
        const double di = out.grid_index[a][static_cast<std::size_t>(q)] - out.grid_index[b][static_cast<std::size_t>(q)];
        flat += di * di * out.eps * out.eps;
        bent += di * di * (q == k - 1 ? out.eta * out.eta : out.eps * out.eps);
      }
      out.d1.set(a, b, std::sqrt(flat));
      out.d2.set(a, b, std::sqrt(bent));
    }
  }
  out.u1 = {u1, "flat", "k=" + std::to_string(k) + " m=" + std::to_string(m)};
  out.u2 = {u2, "bumped", "k=" + std::to_string(k) + " m=" + std::to_string(m) + " A=" + std::to_string(amplitude)};
  return out;
}

}  // namespace geodesy
