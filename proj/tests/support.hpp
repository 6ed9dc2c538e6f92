#pragma once

// Shared helpers for the test suites: small deterministic mesh builders,
// rank statistics, and transform utilities.

#include <algorithm>
#include <map>
#include <numeric>
#include <random>
#include <tuple>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Geometry>

#include "pinchlab/mesh.hpp"

namespace testsupport {

using pinchlab::Mesh;
using pinchlab::Vec3;

/// Regular tetrahedron with outward orientation.
inline Mesh tetrahedron() {
  Mesh m;
  m.vertices = {{1, 1, 1}, {1, -1, -1}, {-1, 1, -1}, {-1, -1, 1}};
  m.faces = {{0, 2, 1}, {0, 1, 3}, {0, 3, 2}, {1, 2, 3}};
  if (pinchlab::signed_volume(m) < 0)
    for (auto& f : m.faces) std::swap(f[1], f[2]);
  return m;
}

/// Axis-aligned unit cube triangulated so that the three faces at corner 0
/// are split along diagonals through corner 0.
inline Mesh cube() {
  Mesh m;
  m.vertices = {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0},
                {0, 0, 1}, {1, 0, 1}, {1, 1, 1}, {0, 1, 1}};
  m.faces = {{0, 3, 2}, {0, 2, 1},   // z = 0
             {4, 5, 6}, {4, 6, 7},   // z = 1
             {0, 1, 5}, {0, 5, 4},   // y = 0
             {2, 3, 7}, {2, 7, 6},   // y = 1
             {0, 4, 7}, {0, 7, 3},   // x = 0
             {1, 2, 6}, {1, 6, 5}};  // x = 1
  return m;
}

/// Cube of side `side` with each face refined into a g x g vertex grid;
/// face-interior vertices have exactly planar neighborhoods.
inline Mesh subdivided_cube(double side, int g) {
  Mesh m;
  std::map<std::tuple<long, long, long>, int> index;
  auto vertex_at = [&](const Vec3& p) {
    const auto key = std::make_tuple(std::lround(p[0] * g / side * 2),
                                     std::lround(p[1] * g / side * 2),
                                     std::lround(p[2] * g / side * 2));
    auto it = index.find(key);
    if (it != index.end()) return it->second;
    const int idx = static_cast<int>(m.vertices.size());
    m.vertices.push_back(p);
    index.emplace(key, idx);
    return idx;
  };
  struct Face {
    Vec3 origin, u, v;
  };
  const double s = side;
  const std::vector<Face> faces = {
      {{0, 0, 0}, {0, s, 0}, {s, 0, 0}}, {{0, 0, s}, {s, 0, 0}, {0, s, 0}},
      {{0, 0, 0}, {s, 0, 0}, {0, 0, s}}, {{0, s, 0}, {0, 0, s}, {s, 0, 0}},
      {{0, 0, 0}, {0, 0, s}, {0, s, 0}}, {{s, 0, 0}, {0, s, 0}, {0, 0, s}}};
  for (const Face& f : faces)
    for (int i = 0; i < g; ++i)
      for (int j = 0; j < g; ++j) {
        auto corner = [&](int a, int b) {
          return vertex_at(f.origin + f.u * (static_cast<double>(a) / g) +
                           f.v * (static_cast<double>(b) / g));
        };
        const int p00 = corner(i, j), p10 = corner(i + 1, j);
        const int p11 = corner(i + 1, j + 1), p01 = corner(i, j + 1);
        m.faces.push_back({p00, p10, p11});
        m.faces.push_back({p00, p11, p01});
      }
  return m;
}

inline Mesh translated(const Mesh& mesh, const Vec3& t) {
  Mesh out = mesh;
  for (Vec3& v : out.vertices) v += t;
  return out;
}

inline Mesh scaled(const Mesh& mesh, double s) {
  Mesh out = mesh;
  for (Vec3& v : out.vertices) v *= s;
  return out;
}

inline Mesh rotated(const Mesh& mesh, const Eigen::Matrix3d& r) {
  Mesh out = mesh;
  for (Vec3& v : out.vertices) v = r * v;
  return out;
}

inline Eigen::Matrix3d random_rotation(unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> gauss;
  Eigen::Quaterniond q(gauss(rng), gauss(rng), gauss(rng), gauss(rng));
  q.normalize();
  return q.toRotationMatrix();
}

/// Spearman rank correlation with average ranks for ties.
inline double spearman(const std::vector<double>& a, const std::vector<double>& b) {
  auto ranks = [](const std::vector<double>& x) {
    const std::size_t n = x.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0u);
    std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return x[i] < x[j]; });
    std::vector<double> rank(n);
    std::size_t i = 0;
    while (i < n) {
      std::size_t j = i;
      while (j + 1 < n && x[order[j + 1]] == x[order[i]]) ++j;
      const double avg = 0.5 * (i + j) + 1.0;
      for (std::size_t k = i; k <= j; ++k) rank[order[k]] = avg;
      i = j + 1;
    }
    return rank;
  };
  const std::vector<double> ra = ranks(a), rb = ranks(b);
  const double n = static_cast<double>(a.size());
  double ma = 0, mb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += ra[i];
    mb += rb[i];
  }
  ma /= n;
  mb /= n;
  double cov = 0, va = 0, vb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    cov += (ra[i] - ma) * (rb[i] - mb);
    va += (ra[i] - ma) * (ra[i] - ma);
    vb += (rb[i] - mb) * (rb[i] - mb);
  }
  if (va == 0 || vb == 0) return 0.0;
  return cov / std::sqrt(va * vb);
}

}  // namespace testsupport
