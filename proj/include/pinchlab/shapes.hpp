#pragma once

// Analytic test shapes: mesh generators plus closed-form curvature oracles.

#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include <json.hpp>

#include "pinchlab/errors.hpp"
#include "pinchlab/mesh.hpp"

namespace pinchlab {

struct Sphere {
  double radius = 1.0;
};

struct Ellipsoid {
  double a = 1.0, b = 1.0, c = 1.0;
};

struct Torus {
  double major_radius = 2.0;
  double minor_radius = 0.5;
};

/// Icosphere with radial field r(u) = R(1 + delta * Y_lm(u)/max|Y_lm|).
struct PerturbedSphere {
  double radius = 1.0;
  double delta = 0.05;
  int l = 3;
  int m = 2;
};

using AnalyticShape = std::variant<Sphere, Ellipsoid, Torus, PerturbedSphere>;

inline constexpr std::size_t kDefaultMaxVertices = 1'000'000;

inline void validate_shape(const AnalyticShape& shape) {
  std::visit(
      [](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Sphere>) {
          if (!(s.radius > 0)) throw ValidationError("sphere radius must be positive");
        } else if constexpr (std::is_same_v<T, Ellipsoid>) {
          if (!(s.a > 0 && s.b > 0 && s.c > 0))
            throw ValidationError("ellipsoid semi-axes must be positive");
        } else if constexpr (std::is_same_v<T, Torus>) {
          if (!(s.major_radius > s.minor_radius && s.minor_radius > 0))
            throw ValidationError("torus needs major_radius > minor_radius > 0");
        } else {
          if (!(s.radius > 0)) throw ValidationError("perturbed sphere radius must be positive");
          if (!(s.delta >= 0 && s.delta < 1))
            throw ValidationError("perturbation amplitude must satisfy 0 <= delta < 1");
          if (s.l < 0 || std::abs(s.m) > s.l)
            throw ValidationError("spherical-harmonic mode needs l >= 0 and |m| <= l");
        }
      },
      shape);
}

inline std::string shape_kind(const AnalyticShape& shape) {
  if (std::holds_alternative<Sphere>(shape)) return "sphere";
  if (std::holds_alternative<Ellipsoid>(shape)) return "ellipsoid";
  if (std::holds_alternative<Torus>(shape)) return "torus";
  return "perturbed_sphere";
}

namespace detail {

// Unit icosphere: icosahedron subdivided `level` times, vertices reprojected
// to the unit sphere after every split. Vertices 0..11 are the icosahedron's.
inline Mesh icosphere_unit(int level) {
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  Mesh mesh;
  mesh.vertices = {{-1, t, 0}, {1, t, 0},   {-1, -t, 0}, {1, -t, 0},
                   {0, -1, t}, {0, 1, t},   {0, -1, -t}, {0, 1, -t},
                   {t, 0, -1}, {t, 0, 1},   {-t, 0, -1}, {-t, 0, 1}};
  for (Vec3& v : mesh.vertices) v.normalize();
  mesh.faces = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
                {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
                {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
  for (int step = 0; step < level; ++step) {
    std::map<std::pair<int, int>, int> midpoint;
    auto mid = [&](int a, int b) {
      const auto key = std::minmax(a, b);
      auto it = midpoint.find(key);
      if (it != midpoint.end()) return it->second;
      const int idx = static_cast<int>(mesh.vertices.size());
      mesh.vertices.push_back((0.5 * (mesh.vertices[a] + mesh.vertices[b])).normalized());
      midpoint.emplace(key, idx);
      return idx;
    };
    std::vector<std::array<int, 3>> next;
    next.reserve(mesh.faces.size() * 4);
    for (const auto& [a, b, c] : mesh.faces) {
      const int ab = mid(a, b), bc = mid(b, c), ca = mid(c, a);
      next.push_back({a, ab, ca});
      next.push_back({b, bc, ab});
      next.push_back({c, ca, bc});
      next.push_back({ab, bc, ca});
    }
    mesh.faces = std::move(next);
  }
  return mesh;
}

inline double factorial_ratio(int num_from, int den_to) {
  // (den_to)! / (num_from)! ... computed as product to avoid overflow for small l
  double r = 1.0;
  for (int k = num_from + 1; k <= den_to; ++k) r *= k;
  return r;
}

}  // namespace detail

/// Real spherical harmonic (orthonormal convention) evaluated at a unit
/// direction; m >= 0 uses cos(m phi), m < 0 uses sin(|m| phi).
inline double real_spherical_harmonic(int l, int m, const Vec3& u) {
  const int am = std::abs(m);
  const double ct = std::clamp(u[2], -1.0, 1.0);
  const double phi = std::atan2(u[1], u[0]);
  const double norm = std::sqrt((2.0 * l + 1.0) / (4.0 * std::numbers::pi) /
                                detail::factorial_ratio(l - am, l + am)) *
                      (am == 0 ? 1.0 : std::numbers::sqrt2);
  const double p = std::assoc_legendre(l, am, ct);
  return norm * p * (m >= 0 ? std::cos(am * phi) : std::sin(am * phi));
}

/// Maximum of |Y_lm| over the sphere (dense scan in the polar angle plus a
/// parabolic refinement; the azimuthal factor attains 1).
inline double spherical_harmonic_max_abs(int l, int m) {
  const int am = std::abs(m);
  const double norm = std::sqrt((2.0 * l + 1.0) / (4.0 * std::numbers::pi) /
                                detail::factorial_ratio(l - am, l + am)) *
                      (am == 0 ? 1.0 : std::numbers::sqrt2);
  const int n = 200'000;
  auto value = [&](double theta) { return std::abs(std::assoc_legendre(l, am, std::cos(theta))); };
  double best = 0.0;
  int best_i = 0;
  for (int i = 0; i <= n; ++i) {
    const double v = value(std::numbers::pi * i / n);
    if (v > best) {
      best = v;
      best_i = i;
    }
  }
  if (best_i > 0 && best_i < n) {
    const double h = std::numbers::pi / n;
    const double t0 = std::numbers::pi * best_i / n;
    const double fm = value(t0 - h), f0 = value(t0), fp = value(t0 + h);
    const double denom = fm - 2 * f0 + fp;
    if (denom < 0) {
      const double dt = 0.5 * h * (fm - fp) / denom;
      best = std::max(best, value(t0 + dt));
    }
  }
  return norm * best;
}

/// Samples the shape as a closed oriented mesh. `resolution` is the icosphere
/// subdivision level (sphere family) or the grid density per angle (torus).
inline Mesh generate(const AnalyticShape& shape, int resolution,
                     std::size_t max_vertices = kDefaultMaxVertices) {
  validate_shape(shape);
  if (resolution < 1) throw ValidationError("resolution must be >= 1");

  const std::size_t predicted =
      std::holds_alternative<Torus>(shape)
          ? static_cast<std::size_t>(resolution) * static_cast<std::size_t>(resolution)
          : 10u * (std::size_t{1} << (2 * std::min(resolution, 24))) + 2u;
  if (predicted > max_vertices)
    throw ValidationError("resolution " + std::to_string(resolution) + " needs " +
                          std::to_string(predicted) + " vertices, above the cap of " +
                          std::to_string(max_vertices));

  Mesh mesh;
  if (const auto* sph = std::get_if<Sphere>(&shape)) {
    mesh = detail::icosphere_unit(resolution);
    for (Vec3& v : mesh.vertices) v *= sph->radius;
    mesh.name = "sphere";
  } else if (const auto* ell = std::get_if<Ellipsoid>(&shape)) {
    mesh = detail::icosphere_unit(resolution);
    for (Vec3& v : mesh.vertices) {
      v[0] *= ell->a;
      v[1] *= ell->b;
      v[2] *= ell->c;
    }
    mesh.name = "ellipsoid";
  } else if (const auto* tor = std::get_if<Torus>(&shape)) {
    const int n = resolution;
    if (n < 3) throw ValidationError("torus resolution must be >= 3");
    mesh.vertices.resize(static_cast<std::size_t>(n) * n);
    for (int i = 0; i < n; ++i) {
      const double phi = 2.0 * std::numbers::pi * i / n;   // around the axis
      for (int j = 0; j < n; ++j) {
        const double theta = 2.0 * std::numbers::pi * j / n;  // around the tube
        const double ring = tor->major_radius + tor->minor_radius * std::cos(theta);
        mesh.vertices[static_cast<std::size_t>(i) * n + j] = {
            ring * std::cos(phi), ring * std::sin(phi), tor->minor_radius * std::sin(theta)};
      }
    }
    auto at = [n](int i, int j) { return ((i + n) % n) * n + (j + n) % n; };
    mesh.faces.reserve(static_cast<std::size_t>(n) * n * 2);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        mesh.faces.push_back({at(i, j), at(i + 1, j), at(i + 1, j + 1)});
        mesh.faces.push_back({at(i, j), at(i + 1, j + 1), at(i, j + 1)});
      }
    mesh.name = "torus";
  } else {
    const auto& ps = std::get<PerturbedSphere>(shape);
    mesh = detail::icosphere_unit(resolution);
    double max_abs = spherical_harmonic_max_abs(ps.l, ps.m);
    std::vector<double> y(mesh.vertices.size());
    for (std::size_t v = 0; v < mesh.vertices.size(); ++v) {
      y[v] = real_spherical_harmonic(ps.l, ps.m, mesh.vertices[v]);
      max_abs = std::max(max_abs, std::abs(y[v]));
    }
    for (std::size_t v = 0; v < mesh.vertices.size(); ++v)
      mesh.vertices[v] *= ps.radius * (1.0 + ps.delta * (y[v] / max_abs));
    mesh.name = "perturbed_sphere";
  }

  validate_mesh(mesh);
  return mesh;
}

/// Closed-form curvature values at a surface point. kappa1 >= kappa2;
/// tau_norm is the Frobenius norm |kappa1 - kappa2| / sqrt(2).
struct ExactCurvature {
  double kappa1 = 0.0;
  double kappa2 = 0.0;
  double mean = 0.0;
  double h2 = 0.0;
  double scal = 0.0;
  double tau_norm = 0.0;
};

namespace detail {

inline ExactCurvature pack_curvature(double ka, double kb) {
  ExactCurvature ec;
  ec.kappa1 = std::max(ka, kb);
  ec.kappa2 = std::min(ka, kb);
  ec.mean = 0.5 * (ka + kb);
  ec.h2 = ka * kb;
  ec.scal = 2.0 * ec.h2;
  ec.tau_norm = std::abs(ec.kappa1 - ec.kappa2) / std::numbers::sqrt2;
  return ec;
}

}  // namespace detail

/// Exact curvatures of sphere, ellipsoid, or torus at `point` (must lie on
/// the surface to within 1e-9 of the implicit equation). The perturbed sphere
/// has no closed form and is rejected.
inline ExactCurvature exact_curvature(const AnalyticShape& shape, const Vec3& point) {
  validate_shape(shape);
  if (const auto* sph = std::get_if<Sphere>(&shape)) {
    if (std::abs(point.norm() - sph->radius) > 1e-9 * sph->radius)
      throw ValidationError("point is not on the sphere");
    const double k = 1.0 / sph->radius;
    return detail::pack_curvature(k, k);
  }
  if (const auto* ell = std::get_if<Ellipsoid>(&shape)) {
    const Vec3 sq{ell->a * ell->a, ell->b * ell->b, ell->c * ell->c};
    const double implicit = point[0] * point[0] / sq[0] + point[1] * point[1] / sq[1] +
                            point[2] * point[2] / sq[2] - 1.0;
    if (std::abs(implicit) > 1e-9) throw ValidationError("point is not on the ellipsoid");
    // Shape operator of the quadric: tangential part of Hess(F)/|grad F|,
    // outward-positive for the gradient normal.
    const Vec3 grad{2 * point[0] / sq[0], 2 * point[1] / sq[1], 2 * point[2] / sq[2]};
    const double glen = grad.norm();
    const Vec3 n = grad / glen;
    Vec3 t1, t2;
    detail::tangent_basis(n, t1, t2);
    const Vec3 hess_diag{2 / sq[0], 2 / sq[1], 2 / sq[2]};
    auto form = [&](const Vec3& u, const Vec3& v) {
      return (hess_diag.array() * u.array() * v.array()).sum() / glen;
    };
    const double s11 = form(t1, t1), s12 = form(t1, t2), s22 = form(t2, t2);
    const double mid = 0.5 * (s11 + s22);
    const double disc = std::sqrt(0.25 * (s11 - s22) * (s11 - s22) + s12 * s12);
    return detail::pack_curvature(mid + disc, mid - disc);
  }
  if (const auto* tor = std::get_if<Torus>(&shape)) {
    const double rho = std::hypot(point[0], point[1]);
    const double tube = std::hypot(rho - tor->major_radius, point[2]);
    if (std::abs(tube - tor->minor_radius) > 1e-9 * (tor->major_radius + tor->minor_radius))
      throw ValidationError("point is not on the torus");
    const double cos_theta = (rho - tor->major_radius) / tor->minor_radius;
    const double k_ring = cos_theta / (tor->major_radius + tor->minor_radius * cos_theta);
    const double k_tube = 1.0 / tor->minor_radius;
    return detail::pack_curvature(k_ring, k_tube);
  }
  throw ValidationError("no closed-form curvature for a perturbed sphere");
}

/// Shape plus sampling resolution; round-trips through JSON as
/// {kind, params, resolution} and appears verbatim in report provenance.
struct ShapeDescriptor {
  AnalyticShape shape;
  int resolution = 4;
};

inline nlohmann::json shape_to_json(const ShapeDescriptor& desc) {
  nlohmann::json params;
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Sphere>) {
          params = {{"radius", s.radius}};
        } else if constexpr (std::is_same_v<T, Ellipsoid>) {
          params = {{"a", s.a}, {"b", s.b}, {"c", s.c}};
        } else if constexpr (std::is_same_v<T, Torus>) {
          params = {{"major", s.major_radius}, {"minor", s.minor_radius}};
        } else {
          params = {{"radius", s.radius}, {"delta", s.delta}, {"l", s.l}, {"m", s.m}};
        }
      },
      desc.shape);
  return {{"kind", shape_kind(desc.shape)}, {"params", params}, {"resolution", desc.resolution}};
}

inline ShapeDescriptor shape_from_json(const nlohmann::json& j) {
  try {
    ShapeDescriptor desc;
    const std::string kind = j.at("kind").get<std::string>();
    const nlohmann::json& p = j.at("params");
    if (kind == "sphere") {
      desc.shape = Sphere{p.at("radius").get<double>()};
    } else if (kind == "ellipsoid") {
      desc.shape = Ellipsoid{p.at("a").get<double>(), p.at("b").get<double>(),
                             p.at("c").get<double>()};
    } else if (kind == "torus") {
      desc.shape = Torus{p.at("major").get<double>(), p.at("minor").get<double>()};
    } else if (kind == "perturbed_sphere") {
      desc.shape = PerturbedSphere{p.at("radius").get<double>(), p.at("delta").get<double>(),
                                   p.at("l").get<int>(), p.at("m").get<int>()};
    } else {
      throw ValidationError("unknown shape kind '" + kind + "'");
    }
    desc.resolution = j.at("resolution").get<int>();
    validate_shape(desc.shape);
    return desc;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed shape descriptor: ") + e.what());
  }
}

}  // namespace pinchlab
