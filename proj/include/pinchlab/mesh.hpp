#pragma once

// Indexed triangle surfaces embedded in 3-space: validation, per-vertex
// frames, areas, centroid recentering, adjacency.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <queue>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "pinchlab/errors.hpp"

namespace pinchlab {

using Vec3 = Eigen::Vector3d;

/// Closed oriented triangle surface. Faces are counterclockwise when seen
/// from outside. Treated as immutable after validation; all operations on it
/// are pure functions.
struct Mesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> faces;
  std::string name;

  int vertex_count() const { return static_cast<int>(vertices.size()); }
  int face_count() const { return static_cast<int>(faces.size()); }
};

/// Orthonormal frame at a vertex: outward unit normal, two tangent vectors,
/// and the barycentric (one-third) area weight.
struct VertexFrame {
  Vec3 normal;
  Vec3 tangent1;
  Vec3 tangent2;
  double area = 0.0;
};

inline Vec3 face_area_normal(const Mesh& mesh, int f) {
  const auto& [i, j, k] = mesh.faces[f];
  const Vec3 e1 = mesh.vertices[j] - mesh.vertices[i];
  const Vec3 e2 = mesh.vertices[k] - mesh.vertices[i];
  return 0.5 * e1.cross(e2);  // |.| = face area, direction = outward normal
}

inline double face_area(const Mesh& mesh, int f) { return face_area_normal(mesh, f).norm(); }

inline double total_area(const Mesh& mesh) {
  double a = 0.0;
  for (int f = 0; f < mesh.face_count(); ++f) a += face_area(mesh, f);
  return a;
}

inline double bbox_diagonal(const Mesh& mesh) {
  if (mesh.vertices.empty()) return 0.0;
  Vec3 lo = mesh.vertices.front(), hi = mesh.vertices.front();
  for (const Vec3& v : mesh.vertices) {
    lo = lo.cwiseMin(v);
    hi = hi.cwiseMax(v);
  }
  return (hi - lo).norm();
}

/// Signed enclosed volume (positive for outward orientation).
inline double signed_volume(const Mesh& mesh) {
  double v6 = 0.0;
  for (const auto& [i, j, k] : mesh.faces)
    v6 += mesh.vertices[i].dot(mesh.vertices[j].cross(mesh.vertices[k]));
  return v6 / 6.0;
}

namespace detail {

inline std::uint64_t edge_key(int a, int b) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
         static_cast<std::uint32_t>(b);
}

}  // namespace detail

inline int edge_count(const Mesh& mesh) {
  std::unordered_map<std::uint64_t, int> seen;
  seen.reserve(mesh.faces.size() * 3);
  for (const auto& face : mesh.faces)
    for (int c = 0; c < 3; ++c) {
      int a = face[c], b = face[(c + 1) % 3];
      seen[detail::edge_key(std::min(a, b), std::max(a, b))]++;
    }
  return static_cast<int>(seen.size());
}

inline int euler_characteristic(const Mesh& mesh) {
  return mesh.vertex_count() - edge_count(mesh) + mesh.face_count();
}

/// Checks the Mesh invariants: in-range indices, no degenerate faces, every
/// edge in exactly two consistently oriented faces, single connected
/// component. Throws ValidationError naming the offending simplex.
inline void validate_mesh(const Mesh& mesh) {
  const int nv = mesh.vertex_count();
  const int nf = mesh.face_count();
  if (nv < 4 || nf < 1)
    throw ValidationError("mesh has " + std::to_string(nv) + " vertices and " +
                          std::to_string(nf) + " faces; no closed surface is that small");

  for (const Vec3& v : mesh.vertices)
    if (!v.allFinite()) throw ValidationError("non-finite vertex coordinate");

  const double diag = bbox_diagonal(mesh);
  const double area_floor = 1e-12 * diag * diag;

  for (int f = 0; f < nf; ++f) {
    const auto& face = mesh.faces[f];
    for (int c = 0; c < 3; ++c)
      if (face[c] < 0 || face[c] >= nv)
        throw ValidationError("face " + std::to_string(f) + " references vertex " +
                              std::to_string(face[c]) + " out of range [0," +
                              std::to_string(nv) + ")");
    if (face[0] == face[1] || face[1] == face[2] || face[0] == face[2])
      throw ValidationError("face " + std::to_string(f) + " repeats a vertex");
    if (face_area(mesh, f) < area_floor)
      throw ValidationError("face " + std::to_string(f) + " is degenerate (area below tolerance)");
  }

  // Each directed edge must appear exactly once and its reverse exactly once:
  // closed 2-manifold with consistent orientation.
  std::unordered_map<std::uint64_t, int> directed;
  std::unordered_map<std::uint64_t, int> undirected;
  directed.reserve(nf * 3);
  undirected.reserve(nf * 3);
  for (const auto& face : mesh.faces)
    for (int c = 0; c < 3; ++c) {
      int a = face[c], b = face[(c + 1) % 3];
      directed[detail::edge_key(a, b)]++;
      undirected[detail::edge_key(std::min(a, b), std::max(a, b))]++;
    }
  // Deterministic reporting: the smallest offending edge, worst class first.
  std::vector<std::pair<int, int>> nonmanifold, boundary, misoriented;
  for (const auto& [key, count] : undirected) {
    const int a = static_cast<int>(key >> 32);
    const int b = static_cast<int>(key & 0xffffffffu);
    if (count > 2)
      nonmanifold.emplace_back(a, b);
    else if (count == 1)
      boundary.emplace_back(a, b);
    else if (directed[detail::edge_key(a, b)] != 1 || directed[detail::edge_key(b, a)] != 1)
      misoriented.emplace_back(a, b);
  }
  auto edge_name = [](std::vector<std::pair<int, int>>& edges) {
    std::sort(edges.begin(), edges.end());
    return "(" + std::to_string(edges.front().first) + "," +
           std::to_string(edges.front().second) + ")";
  };
  if (!nonmanifold.empty()) {
    const std::string name = edge_name(nonmanifold);
    const int count =
        undirected[detail::edge_key(nonmanifold.front().first, nonmanifold.front().second)];
    throw ValidationError("non-manifold: edge " + name + " used by " + std::to_string(count) +
                          " faces");
  }
  if (!boundary.empty()) throw ValidationError("open boundary at edge " + edge_name(boundary));
  if (!misoriented.empty())
    throw ValidationError("inconsistent orientation across edge " + edge_name(misoriented));

  // Single component and no unreferenced vertices.
  std::vector<std::vector<int>> adj(nv);
  for (const auto& face : mesh.faces)
    for (int c = 0; c < 3; ++c) {
      adj[face[c]].push_back(face[(c + 1) % 3]);
      adj[face[(c + 1) % 3]].push_back(face[c]);
    }
  for (int v = 0; v < nv; ++v)
    if (adj[v].empty())
      throw ValidationError("vertex " + std::to_string(v) + " not referenced by any face");
  std::vector<char> visited(nv, 0);
  std::queue<int> frontier;
  frontier.push(0);
  visited[0] = 1;
  int reached = 1;
  while (!frontier.empty()) {
    int v = frontier.front();
    frontier.pop();
    for (int w : adj[v])
      if (!visited[w]) {
        visited[w] = 1;
        ++reached;
        frontier.push(w);
      }
  }
  if (reached != nv)
    throw ValidationError("mesh is disconnected (" + std::to_string(reached) + " of " +
                          std::to_string(nv) + " vertices reachable from vertex 0)");
}

/// Barycentric vertex areas: one third of incident face areas.
inline std::vector<double> vertex_areas(const Mesh& mesh) {
  std::vector<double> w(mesh.vertex_count(), 0.0);
  for (int f = 0; f < mesh.face_count(); ++f) {
    const double third = face_area(mesh, f) / 3.0;
    for (int c = 0; c < 3; ++c) w[mesh.faces[f][c]] += third;
  }
  return w;
}

namespace detail {

// Deterministic orthonormal tangent pair for a unit normal.
inline void tangent_basis(const Vec3& n, Vec3& t1, Vec3& t2) {
  int axis = 0;
  if (std::abs(n[1]) < std::abs(n[axis])) axis = 1;
  if (std::abs(n[2]) < std::abs(n[axis])) axis = 2;
  Vec3 e = Vec3::Zero();
  e[axis] = 1.0;
  t1 = n.cross(e).normalized();
  t2 = n.cross(t1);
}

}  // namespace detail

/// Per-vertex outward normal (area-weighted average of incident face
/// normals), completed to an orthonormal frame, with barycentric area weight.
inline std::vector<VertexFrame> vertex_frames(const Mesh& mesh) {
  const int nv = mesh.vertex_count();
  std::vector<Vec3> normal_sum(nv, Vec3::Zero());
  std::vector<double> area(nv, 0.0);
  for (int f = 0; f < mesh.face_count(); ++f) {
    const Vec3 an = face_area_normal(mesh, f);
    const double third = an.norm() / 3.0;
    for (int c = 0; c < 3; ++c) {
      normal_sum[mesh.faces[f][c]] += an;
      area[mesh.faces[f][c]] += third;
    }
  }
  std::vector<VertexFrame> frames(nv);
  for (int v = 0; v < nv; ++v) {
    const double len = normal_sum[v].norm();
    if (len <= 1e-12 * 3.0 * area[v])
      throw ValidationError("vertex " + std::to_string(v) +
                            ": incident face normals cancel; no outward normal");
    VertexFrame& fr = frames[v];
    fr.normal = normal_sum[v] / len;
    detail::tangent_basis(fr.normal, fr.tangent1, fr.tangent2);
    fr.area = area[v];
  }
  return frames;
}

inline Vec3 area_weighted_centroid(const Mesh& mesh) {
  const std::vector<double> w = vertex_areas(mesh);
  Vec3 c = Vec3::Zero();
  double total = 0.0;
  for (int v = 0; v < mesh.vertex_count(); ++v) {
    c += w[v] * mesh.vertices[v];
    total += w[v];
  }
  return c / total;
}

/// Translates the mesh so its area-weighted vertex centroid is the origin.
inline Mesh centroid_recenter(const Mesh& mesh) {
  const Vec3 c = area_weighted_centroid(mesh);
  Mesh out = mesh;
  for (Vec3& v : out.vertices) v -= c;
  return out;
}

/// Sorted one-ring neighbor lists.
inline std::vector<std::vector<int>> vertex_neighbors(const Mesh& mesh) {
  std::vector<std::vector<int>> adj(mesh.vertex_count());
  for (const auto& face : mesh.faces)
    for (int c = 0; c < 3; ++c) {
      adj[face[c]].push_back(face[(c + 1) % 3]);
      adj[face[(c + 1) % 3]].push_back(face[c]);
    }
  for (auto& ring : adj) {
    std::sort(ring.begin(), ring.end());
    ring.erase(std::unique(ring.begin(), ring.end()), ring.end());
  }
  return adj;
}

}  // namespace pinchlab
