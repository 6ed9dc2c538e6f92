#pragma once

// Per-vertex extrinsic curvature estimation (shape operator via osculating
// quadric fits) and the derived intrinsic quantities.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "pinchlab/errors.hpp"
#include "pinchlab/mesh.hpp"

namespace pinchlab {

using Mat2 = Eigen::Matrix2d;

/// r-th elementary symmetric polynomial of `values`; sigma_0 = 1.
inline double symmetric_polynomial(std::span<const double> values, int r) {
  const int n = static_cast<int>(values.size());
  if (r < 0 || r > n)
    throw ValidationError("symmetric polynomial order " + std::to_string(r) +
                          " out of range [0," + std::to_string(n) + "]");
  std::vector<double> e(static_cast<std::size_t>(r) + 1, 0.0);
  e[0] = 1.0;
  for (int i = 0; i < n; ++i)
    for (int j = std::min(r, i + 1); j >= 1; --j) e[j] += e[j - 1] * values[i];
  return e[r];
}

/// H_r = sigma_r(kappa) / C(n, r) for r = 0..n.
inline std::vector<double> higher_mean_curvatures(std::span<const double> kappa) {
  const int n = static_cast<int>(kappa.size());
  std::vector<double> hr(static_cast<std::size_t>(n) + 1);
  double binom = 1.0;
  for (int r = 0; r <= n; ++r) {
    hr[r] = symmetric_polynomial(kappa, r) / binom;
    binom = binom * (n - r) / (r + 1);
  }
  return hr;
}

/// Once-traced Gauss formula: Ric = n H S - S^2 in the tangent frame.
inline Mat2 ricci_from_gauss(const Mat2& shape_op, double mean, int n) {
  return n * mean * shape_op - shape_op * shape_op;
}

/// Trace-free part of the shape operator: tau = S - H Id.
inline Mat2 umbilicity_tensor(const Mat2& shape_op, double mean) {
  return shape_op - mean * Mat2::Identity();
}

/// Discrete Gaussian curvature by angle defect, (2 pi - sum of incident
/// angles) / vertex area. The total over the mesh is exactly 2 pi chi.
inline std::vector<double> angle_defect_gauss(const Mesh& mesh) {
  const std::vector<double> w = vertex_areas(mesh);
  std::vector<double> defect(mesh.vertex_count(), 2.0 * std::numbers::pi);
  for (const auto& [a, b, c] : mesh.faces) {
    const Vec3& pa = mesh.vertices[a];
    const Vec3& pb = mesh.vertices[b];
    const Vec3& pc = mesh.vertices[c];
    auto corner = [](const Vec3& at, const Vec3& u, const Vec3& v) {
      const Vec3 e1 = u - at, e2 = v - at;
      return std::atan2(e1.cross(e2).norm(), e1.dot(e2));
    };
    defect[a] -= corner(pa, pb, pc);
    defect[b] -= corner(pb, pc, pa);
    defect[c] -= corner(pc, pa, pb);
  }
  std::vector<double> gauss(mesh.vertex_count());
  for (int v = 0; v < mesh.vertex_count(); ++v) gauss[v] = defect[v] / w[v];
  return gauss;
}

struct ShapeOperatorEstimate {
  std::vector<Mat2> op;         // symmetric, in the vertex tangent frame
  std::vector<char> flagged;    // rank-deficient fits recovered from neighbors
  int flagged_count = 0;
};

namespace detail {

// Two-ring of v (one-ring plus its one-rings), v excluded, sorted.
inline std::vector<int> two_ring(const std::vector<std::vector<int>>& adj, int v) {
  std::vector<int> ring;
  for (int u : adj[v]) {
    ring.push_back(u);
    for (int w : adj[u])
      if (w != v) ring.push_back(w);
  }
  std::sort(ring.begin(), ring.end());
  ring.erase(std::unique(ring.begin(), ring.end()), ring.end());
  return ring;
}

// Transport a neighbor's shape operator into the frame at v by the minimal
// rotation aligning the normals.
inline bool transport_operator(const VertexFrame& to, const VertexFrame& from, const Mat2& s,
                               Mat2& out) {
  const double c = from.normal.dot(to.normal);
  if (c <= -1.0 + 1e-12) return false;
  const Vec3 axis = from.normal.cross(to.normal);
  Eigen::Matrix3d rot = Eigen::Matrix3d::Identity();
  Eigen::Matrix3d cross;
  cross << 0, -axis[2], axis[1], axis[2], 0, -axis[0], -axis[1], axis[0], 0;
  rot += cross + cross * cross / (1.0 + c);
  Eigen::Matrix<double, 3, 2> tb;
  tb.col(0) = to.tangent1;
  tb.col(1) = to.tangent2;
  Eigen::Matrix<double, 3, 2> fb;
  fb.col(0) = from.tangent1;
  fb.col(1) = from.tangent2;
  const Mat2 p = fb.transpose() * rot.transpose() * tb;  // v-frame -> neighbor frame
  const Mat2 s_at_v = p.transpose() * s * p;
  out = 0.5 * (s_at_v + s_at_v.transpose());
  return true;
}

}  // namespace detail

/// Fits the osculating quadric z = (a x^2 + 2 b xy + c y^2)/2 plus linear and
/// cubic correction terms over each vertex's two-ring in its tangent frame
/// and returns the shape operator -[[a,b],[b,c]], signed so spheres with
/// outward normals have positive curvature. The correction terms are
/// discarded; without them the odd-order surface terms alias into the
/// quadric on asymmetric stencils. Rank-deficient fits are flagged and
/// filled from one-ring neighbors; more than 1% flagged aborts.
inline ShapeOperatorEstimate estimate_shape_operator(const Mesh& mesh,
                                                     const std::vector<VertexFrame>& frames) {
  const int nv = mesh.vertex_count();
  const std::vector<std::vector<int>> adj = vertex_neighbors(mesh);
  ShapeOperatorEstimate est;
  est.op.assign(nv, Mat2::Zero());
  est.flagged.assign(nv, 0);
  constexpr int kUnknowns = 9;

  for (int v = 0; v < nv; ++v) {
    const std::vector<int> ring = detail::two_ring(adj, v);
    if (ring.size() < kUnknowns) {
      est.flagged[v] = 1;
      continue;
    }
    // Coordinates scaled by the ring radius to keep the system well
    // conditioned; the quadric coefficients are rescaled back below.
    double scale = 0.0;
    for (int u : ring) scale = std::max(scale, (mesh.vertices[u] - mesh.vertices[v]).norm());
    const VertexFrame& fr = frames[v];
    Eigen::MatrixXd a(ring.size(), kUnknowns);
    Eigen::VectorXd rhs(ring.size());
    for (std::size_t i = 0; i < ring.size(); ++i) {
      const Vec3 d = (mesh.vertices[ring[i]] - mesh.vertices[v]) / scale;
      const double x = d.dot(fr.tangent1);
      const double y = d.dot(fr.tangent2);
      a(i, 0) = 0.5 * x * x;
      a(i, 1) = x * y;
      a(i, 2) = 0.5 * y * y;
      a(i, 3) = x;
      a(i, 4) = y;
      a(i, 5) = x * x * x;
      a(i, 6) = x * x * y;
      a(i, 7) = x * y * y;
      a(i, 8) = y * y * y;
      rhs(i) = d.dot(fr.normal);
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
    qr.setThreshold(1e-10);
    if (qr.rank() < kUnknowns) {
      est.flagged[v] = 1;
      continue;
    }
    const Eigen::VectorXd sol = qr.solve(rhs);
    if (!sol.allFinite()) {
      est.flagged[v] = 1;
      continue;
    }
    Mat2 s;
    s << sol(0), sol(1), sol(1), sol(2);
    est.op[v] = -s / scale;
  }

  // Fill flagged vertices from successfully fitted one-ring neighbors.
  for (int v = 0; v < nv; ++v) {
    if (!est.flagged[v]) continue;
    Mat2 sum = Mat2::Zero();
    int count = 0;
    for (int u : adj[v]) {
      if (est.flagged[u]) continue;
      Mat2 transported;
      if (detail::transport_operator(frames[v], frames[u], est.op[u], transported)) {
        sum += transported;
        ++count;
      }
    }
    if (count > 0) est.op[v] = sum / count;
    ++est.flagged_count;
  }
  if (est.flagged_count > 0 &&
      static_cast<double>(est.flagged_count) > 0.01 * static_cast<double>(nv))
    throw ValidationError("shape-operator fit failed at " + std::to_string(est.flagged_count) +
                          " of " + std::to_string(nv) + " vertices (limit 1%)");
  return est;
}

/// Full per-vertex curvature stack of an n = 2 hypersurface mesh.
struct CurvatureField {
  int dim = 2;  // hypersurface dimension n
  std::vector<Mat2> shape_op;
  std::vector<double> kappa1, kappa2;       // principal curvatures, kappa1 >= kappa2
  std::vector<double> mean;                 // H = (kappa1 + kappa2) / 2
  std::vector<std::vector<double>> hr;      // hr[r][v], r = 0..dim
  std::vector<double> scal;                 // n(n-1) H_2
  std::vector<Mat2> ricci;                  // n H S - S^2
  std::vector<Mat2> tau;                    // S - H Id
  std::vector<double> tau_norm;             // Frobenius norm of tau
  std::vector<double> angle_defect;         // independent Gaussian curvature
  std::vector<char> flagged;
  int flagged_count = 0;

  int vertex_count() const { return static_cast<int>(mean.size()); }
};

inline CurvatureField compute_curvature_field(const Mesh& mesh,
                                              const std::vector<VertexFrame>& frames) {
  const int nv = mesh.vertex_count();
  ShapeOperatorEstimate est = estimate_shape_operator(mesh, frames);

  CurvatureField field;
  field.dim = 2;
  field.shape_op = std::move(est.op);
  field.flagged = std::move(est.flagged);
  field.flagged_count = est.flagged_count;
  field.kappa1.resize(nv);
  field.kappa2.resize(nv);
  field.mean.resize(nv);
  field.hr.assign(3, std::vector<double>(nv));
  field.scal.resize(nv);
  field.ricci.resize(nv);
  field.tau.resize(nv);
  field.tau_norm.resize(nv);

  for (int v = 0; v < nv; ++v) {
    const Mat2& s = field.shape_op[v];
    const double mid = 0.5 * (s(0, 0) + s(1, 1));
    const double disc =
        std::sqrt(0.25 * (s(0, 0) - s(1, 1)) * (s(0, 0) - s(1, 1)) + s(0, 1) * s(0, 1));
    const double k1 = mid + disc, k2 = mid - disc;
    field.kappa1[v] = k1;
    field.kappa2[v] = k2;
    field.mean[v] = 0.5 * (k1 + k2);
    field.hr[0][v] = 1.0;
    field.hr[1][v] = field.mean[v];
    field.hr[2][v] = k1 * k2;
    field.scal[v] = 2.0 * field.hr[2][v];
    field.ricci[v] = ricci_from_gauss(s, field.mean[v], 2);
    field.tau[v] = umbilicity_tensor(s, field.mean[v]);
    const Mat2& t = field.tau[v];
    field.tau_norm[v] =
        std::sqrt(t(0, 0) * t(0, 0) + 2.0 * t(0, 1) * t(0, 1) + t(1, 1) * t(1, 1));
  }
  field.angle_defect = angle_defect_gauss(mesh);
  return field;
}

/// Largest absolute eigenvalue of a symmetric 2x2 (operator norm).
inline double operator_norm_sym2(const Mat2& m) {
  const double mid = 0.5 * (m(0, 0) + m(1, 1));
  const double disc =
      std::sqrt(0.25 * (m(0, 0) - m(1, 1)) * (m(0, 0) - m(1, 1)) + m(0, 1) * m(0, 1));
  return std::max(std::abs(mid + disc), std::abs(mid - disc));
}

}  // namespace pinchlab
