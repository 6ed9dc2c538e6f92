#pragma once

// Sphere comparison and stability diagnostics: least-squares sphere fit,
// quasi-isometry distortion of the radial projection, almost-Einstein /
// almost-umbilic / almost-CMC deviation norms, and the orchestrated report.

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "pinchlab/curvature.hpp"
#include "pinchlab/errors.hpp"
#include "pinchlab/functionals.hpp"
#include "pinchlab/mesh.hpp"
#include "pinchlab/spectral.hpp"

namespace pinchlab {

struct SphereFit {
  Vec3 center = Vec3::Zero();
  double radius = 0.0;
  double rms_radial_error = 0.0;
};

/// Least-squares sphere through the vertices: linear algebraic fit followed
/// by one Gauss-Newton step on the geometric radial error.
inline SphereFit fit_sphere(const Mesh& mesh) {
  const int nv = mesh.vertex_count();
  Eigen::MatrixXd a(nv, 4);
  Eigen::VectorXd b(nv);
  for (int v = 0; v < nv; ++v) {
    const Vec3& p = mesh.vertices[v];
    a(v, 0) = 2 * p[0];
    a(v, 1) = 2 * p[1];
    a(v, 2) = 2 * p[2];
    a(v, 3) = 1.0;
    b(v) = p.squaredNorm();
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
  if (qr.rank() < 4) throw ValidationError("sphere fit is degenerate (coplanar vertices?)");
  const Eigen::Vector4d sol = qr.solve(b);
  Vec3 center = sol.head<3>();
  double radius = std::sqrt(std::max(0.0, sol[3] + center.squaredNorm()));

  // One Gauss-Newton step on r_i = |x_i - c| - R.
  Eigen::Matrix4d jtj = Eigen::Matrix4d::Zero();
  Eigen::Vector4d jtr = Eigen::Vector4d::Zero();
  for (int v = 0; v < nv; ++v) {
    const Vec3 d = mesh.vertices[v] - center;
    const double len = d.norm();
    if (len < 1e-300) continue;
    Eigen::Vector4d j;
    j.head<3>() = -d / len;
    j[3] = -1.0;
    jtj += j * j.transpose();
    jtr += j * (len - radius);
  }
  const Eigen::Vector4d step = jtj.ldlt().solve(-jtr);
  if (step.allFinite()) {
    center += step.head<3>();
    radius += step[3];
  }

  SphereFit fit;
  fit.center = center;
  fit.radius = radius;
  double sq = 0.0;
  for (int v = 0; v < nv; ++v) {
    const double r = (mesh.vertices[v] - center).norm() - radius;
    sq += r * r;
  }
  fit.rms_radial_error = std::sqrt(sq / nv);
  return fit;
}

namespace detail {

// Edge vectors of a triangle expressed in an orthonormal basis of its plane.
inline bool plane_coordinates(const Vec3& e1, const Vec3& e2, Mat2& coords) {
  const double l1 = e1.norm();
  if (l1 < 1e-300) return false;
  const Vec3 b1 = e1 / l1;
  const Vec3 e2p = e2 - b1 * b1.dot(e2);
  const double l2 = e2p.norm();  // = <b2, e2> for the second basis vector
  if (l2 < 1e-300 * l1) return false;
  coords << l1, b1.dot(e2), 0.0, l2;
  return true;
}

}  // namespace detail

/// Quasi-isometry distortion of the per-face chordal radial projection onto
/// the fitted sphere: the largest |sigma^2 - 1| over all faces and both
/// singular values of the edge-vector map. Exactly zero when the vertices
/// lie on the fitted sphere. Requires the mesh to be star-shaped with
/// respect to the fit center (positive <X - c, nu> at every vertex).
inline double distortion(const Mesh& mesh, const std::vector<VertexFrame>& frames,
                         const SphereFit& fit) {
  std::vector<int> offending;
  for (int v = 0; v < mesh.vertex_count(); ++v)
    if ((mesh.vertices[v] - fit.center).dot(frames[v].normal) <= 0.0) offending.push_back(v);
  if (!offending.empty()) {
    std::string list;
    for (std::size_t i = 0; i < offending.size() && i < 8; ++i)
      list += (i ? "," : "") + std::to_string(offending[i]);
    if (offending.size() > 8) list += ",...";
    throw ValidationError("not star-shaped from the fitted center: " +
                          std::to_string(offending.size()) + " vertices with <X-c,nu> <= 0 (" +
                          list + ")");
  }

  std::vector<Vec3> projected(mesh.vertex_count());
  for (int v = 0; v < mesh.vertex_count(); ++v) {
    const Vec3 d = mesh.vertices[v] - fit.center;
    projected[v] = fit.center + fit.radius * d / d.norm();
  }

  double worst = 0.0;
  for (const auto& [i, j, k] : mesh.faces) {
    Mat2 u, w;
    if (!detail::plane_coordinates(mesh.vertices[j] - mesh.vertices[i],
                                   mesh.vertices[k] - mesh.vertices[i], u) ||
        !detail::plane_coordinates(projected[j] - projected[i], projected[k] - projected[i], w))
      throw ValidationError("degenerate face under radial projection");
    const Mat2 map = w * u.inverse();
    // Squared singular values are the eigenvalues of map^T map.
    const Mat2 gram = map.transpose() * map;
    const double mid = 0.5 * (gram(0, 0) + gram(1, 1));
    const double disc = std::sqrt(
        std::max(0.0, 0.25 * (gram(0, 0) - gram(1, 1)) * (gram(0, 0) - gram(1, 1)) +
                          gram(0, 1) * gram(1, 0)));
    worst = std::max({worst, std::abs(mid + disc - 1.0), std::abs(mid - disc - 1.0)});
  }
  return worst;
}

/// Lq norm of the per-vertex operator norm of Ric - (n-1) k g.
inline double einstein_deviation(const std::vector<VertexFrame>& frames,
                                 const CurvatureField& curv, double k, double q,
                                 const NormSpec& spec) {
  if (!(k > 0)) throw ValidationError("einstein deviation requires k > 0");
  const double target = (curv.dim - 1) * k;
  std::vector<double> dev(curv.vertex_count());
  for (int v = 0; v < curv.vertex_count(); ++v)
    dev[v] = operator_norm_sym2(curv.ricci[v] - target * Mat2::Identity());
  return lp_norm(frames, dev, NormSpec{q, spec.normalized});
}

/// Almost-umbilic deviation norms against the comparison curvature sqrt(k):
/// ||B - sqrt(k) g||_2q, ||tau||_2q, ||H^2 - k||_q, ||B - sqrt(k) g||_inf,
/// all with per-vertex operator norms for the tensor quantities.
struct UmbilicDeviations {
  double b_dev_2q = 0.0;
  double tau_2q = 0.0;
  double h2_dev_q = 0.0;
  double b_dev_inf = 0.0;
};

inline UmbilicDeviations umbilic_deviations(const std::vector<VertexFrame>& frames,
                                            const CurvatureField& curv, double k, double q,
                                            bool normalized = true) {
  if (!(k > 0)) throw ValidationError("umbilic deviations require k > 0");
  const double root_k = std::sqrt(k);
  const int nv = curv.vertex_count();
  std::vector<double> b_dev(nv), tau_dev(nv), h2_dev(nv);
  for (int v = 0; v < nv; ++v) {
    b_dev[v] = operator_norm_sym2(curv.shape_op[v] - root_k * Mat2::Identity());
    tau_dev[v] = operator_norm_sym2(curv.tau[v]);
    h2_dev[v] = curv.mean[v] * curv.mean[v] - k;
  }
  UmbilicDeviations out;
  out.b_dev_2q = lp_norm(frames, b_dev, NormSpec{2.0 * q, normalized});
  out.tau_2q = lp_norm(frames, tau_dev, NormSpec{2.0 * q, normalized});
  out.h2_dev_q = lp_norm(frames, h2_dev, NormSpec{q, normalized});
  out.b_dev_inf = lp_norm(frames, b_dev,
                          NormSpec{std::numeric_limits<double>::infinity(), normalized});
  return out;
}

/// Almost-CMC diagnostics: mean values of H and Scal, their sup deviations,
/// and the gap |s_bar - n(n-1) h_bar^2| that the two force together.
struct CmcReport {
  double h_bar = 0.0;
  double s_bar = 0.0;
  double cmc_eps = 0.0;
  double scal_eps = 0.0;
  double lemma_gap = 0.0;
  double gap_ratio = 0.0;  // lemma_gap / max(cmc_eps, scal_eps)
};

inline CmcReport cmc_report(const std::vector<VertexFrame>& frames, const CurvatureField& curv) {
  const double vol = surface_volume(frames);
  CmcReport report;
  report.h_bar = integrate(frames, curv.mean) / vol;
  report.s_bar = integrate(frames, curv.scal) / vol;
  double cmc = 0.0, scal = 0.0;
  for (int v = 0; v < curv.vertex_count(); ++v) {
    cmc = std::max(cmc, std::abs(curv.mean[v] - report.h_bar));
    scal = std::max(scal, std::abs(curv.scal[v] - report.s_bar));
  }
  report.cmc_eps = cmc;
  report.scal_eps = scal;
  const double n = curv.dim;
  report.lemma_gap = std::abs(report.s_bar - n * (n - 1) * report.h_bar * report.h_bar);
  report.gap_ratio = report.lemma_gap / std::max({cmc, scal, 1e-300});
  return report;
}

/// Hypothesis parameters for an analysis run.
struct AnalysisConfig {
  int n = 2;          // hypersurface dimension; meshes fix n = 2
  double p = 2.0;     // Hoelder exponent in k_{p,r}, >= 2
  double q = 2.0;     // deviation-norm exponent, warning when q <= n/2
  int r = 2;          // curvature order, 1..n
  double tol = 1e-10;
  int max_iter = 500;
  bool normalized_deviations = true;
};

inline void validate_config(const AnalysisConfig& config) {
  if (config.n != 2) throw ValidationError("mesh analyses support n = 2 only");
  if (!(config.p >= 2.0)) throw ValidationError("exponent p must be >= 2");
  if (!(config.q >= 1.0)) throw ValidationError("exponent q must be >= 1");
  if (config.r < 1 || config.r > config.n)
    throw ValidationError("curvature order r must be in 1.." + std::to_string(config.n));
  if (!(config.tol > 0)) throw ValidationError("solver tolerance must be positive");
  if (config.max_iter < 1) throw ValidationError("max_iter must be >= 1");
}

/// Everything the analysis pipeline measures on one mesh.
struct PinchReport {
  AnalysisConfig config;
  int vertex_count = 0;
  int face_count = 0;
  int euler = 0;

  SphereFit sphere;
  double radius_from_lambda1 = 0.0;  // sqrt(n / lambda1)
  double radius_from_k = 0.0;        // 1 / sqrt(k_pr)
  std::optional<double> theta_hat;   // absent when not star-shaped
  std::string theta_note;

  SpectralResult spectral;
  DeficitReport functionals;
  double einstein_dev = 0.0;
  UmbilicDeviations umbilic;
  CmcReport cmc;

  std::vector<std::string> warnings;
  std::string source;  // shape descriptor JSON or input path
};

/// Runs the full pipeline: recenter, frames, curvature, spectrum,
/// functionals, sphere fit, distortion, deviations with k = k_{p,r}, CMC
/// report. Star-shapedness failure downgrades theta to a note; any other
/// stage failure is rethrown as PipelineError with the stage name.
inline PinchReport analyze(const Mesh& input, const AnalysisConfig& config,
                           std::string source = "") {
  validate_config(config);
  PinchReport report;
  report.config = config;
  report.source = std::move(source);

  auto stage = [](const char* name, auto&& fn) {
    try {
      return fn();
    } catch (const PipelineError&) {
      throw;
    } catch (const std::exception& e) {
      throw PipelineError(name, e.what());
    }
  };

  const Mesh mesh = stage("recenter", [&] {
    validate_mesh(input);
    return centroid_recenter(input);
  });
  report.vertex_count = mesh.vertex_count();
  report.face_count = mesh.face_count();
  report.euler = euler_characteristic(mesh);

  const std::vector<VertexFrame> frames = stage("frames", [&] { return vertex_frames(mesh); });
  const CurvatureField curv =
      stage("curvature", [&] { return compute_curvature_field(mesh, frames); });
  report.spectral = stage("spectral", [&] {
    return first_eigenvalue(stiffness_matrix(mesh), mass_matrix(mesh), config.tol,
                            config.max_iter);
  });
  if (!report.spectral.converged)
    report.warnings.push_back("eigensolver did not reach tolerance " +
                              std::to_string(config.tol) + " in " +
                              std::to_string(report.spectral.iterations) + " iterations");
  if (report.spectral.gap_warning)
    report.warnings.push_back(report.spectral.sphere_like
                                  ? "info: three-fold first eigenvalue cluster (sphere-like)"
                                  : "near-degenerate first eigenvalue cluster");

  report.functionals = stage("functionals", [&] {
    return make_deficit_report(mesh, frames, curv, report.spectral.lambda1, config.p, config.r);
  });

  report.sphere = stage("sphere_fit", [&] { return fit_sphere(mesh); });
  report.radius_from_lambda1 = std::sqrt(config.n / report.spectral.lambda1);
  report.radius_from_k = 1.0 / std::sqrt(report.functionals.k_pr);

  try {
    report.theta_hat = distortion(mesh, frames, report.sphere);
  } catch (const ValidationError& e) {
    report.theta_hat.reset();
    report.theta_note = e.what();
  }

  if (config.q <= config.n / 2.0)
    report.warnings.push_back(
        "q <= n/2: Ricci-based eigenvalue lower bound does not apply at this exponent");

  const double k = report.functionals.k_pr;
  report.einstein_dev = stage("deviations", [&] {
    return einstein_deviation(frames, curv, k, config.q,
                              NormSpec{config.q, config.normalized_deviations});
  });
  report.umbilic = stage("deviations", [&] {
    return umbilic_deviations(frames, curv, k, config.q, config.normalized_deviations);
  });
  report.cmc = stage("cmc", [&] { return cmc_report(frames, curv); });
  return report;
}

}  // namespace pinchlab
