#pragma once

// Cotangent Laplace-Beltrami discretization and the first nonzero eigenvalue
// of the generalized pencil (stiffness, mass).

#include <cmath>
#include <numbers>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/IterativeLinearSolvers>
#include <Eigen/Sparse>

#include "pinchlab/errors.hpp"
#include "pinchlab/mesh.hpp"

namespace pinchlab {

using SparseMat = Eigen::SparseMatrix<double>;

/// Cotangent stiffness matrix: off-diagonal -(cot a + cot b)/2 over the two
/// angles opposite each edge, diagonal the negated row sum. Symmetric
/// positive semidefinite; constants span the kernel on connected meshes.
inline SparseMat stiffness_matrix(const Mesh& mesh) {
  const int nv = mesh.vertex_count();
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(mesh.faces.size() * 12);
  for (const auto& face : mesh.faces) {
    for (int c = 0; c < 3; ++c) {
      const int apex = face[c], i = face[(c + 1) % 3], j = face[(c + 2) % 3];
      const Vec3 e1 = mesh.vertices[i] - mesh.vertices[apex];
      const Vec3 e2 = mesh.vertices[j] - mesh.vertices[apex];
      const double cot = e1.dot(e2) / e1.cross(e2).norm();
      const double w = 0.5 * cot;
      triplets.emplace_back(i, j, -w);
      triplets.emplace_back(j, i, -w);
      triplets.emplace_back(i, i, w);
      triplets.emplace_back(j, j, w);
    }
  }
  SparseMat k(nv, nv);
  k.setFromTriplets(triplets.begin(), triplets.end());
  return k;
}

/// Diagonal barycentric mass matrix; the trace is the total surface area.
inline SparseMat mass_matrix(const Mesh& mesh) {
  const std::vector<double> w = vertex_areas(mesh);
  const int nv = mesh.vertex_count();
  SparseMat m(nv, nv);
  m.reserve(Eigen::VectorXi::Constant(nv, 1));
  for (int v = 0; v < nv; ++v) m.insert(v, v) = w[v];
  m.makeCompressed();
  return m;
}

/// First nonzero generalized eigenvalue and diagnostics. `cluster_width` is
/// the relative spread of the Ritz values within 5% of lambda1 (spheres carry
/// a three-fold cluster), `residual` the 2-norm of the symmetrized operator
/// equation at the returned eigenvector.
struct SpectralResult {
  double lambda1 = 0.0;
  std::vector<double> eigenvector;  // mass-orthogonal to constants
  double residual = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> ritz_values;  // smallest nonzero Ritz values found
  double cluster_width = 0.0;
  int cluster_size = 1;
  bool gap_warning = false;   // second and third eigenvalues closer than tol
  bool sphere_like = false;   // three-fold first cluster, expected on spheres
};

namespace detail {

inline void project_out(Eigen::VectorXd& v, const Eigen::VectorXd& unit) {
  v -= unit.dot(v) * unit;
}

}  // namespace detail

/// Smallest nonzero eigenvalue of (stiffness, mass) by block inverse
/// iteration with Rayleigh-Ritz extraction. The constant mode is handled by
/// deflation: the diagonal mass turns the pencil into an ordinary symmetric
/// problem, whose known kernel direction is projected out of the right-hand
/// sides and iterates; the singular inner systems stay consistent and are
/// solved by conjugate gradients, shift-free. `seed` selects among
/// deterministic starting blocks. On non-convergence the last iterate is
/// returned with `converged == false`.
inline SpectralResult first_eigenvalue(const SparseMat& stiffness, const SparseMat& mass,
                                       double tol = 1e-10, int max_iter = 500, int seed = 0) {
  const int n = static_cast<int>(stiffness.rows());
  if (stiffness.rows() != stiffness.cols() || mass.rows() != mass.cols() ||
      stiffness.rows() != mass.rows())
    throw ValidationError("stiffness and mass matrices must be square and of equal size");
  if (!(tol > 0)) throw ValidationError("solver tolerance must be positive");

  // Symmetrize with the diagonal mass: A = D^-1 K D^-1, D = M^(1/2).
  Eigen::VectorXd d(n);
  for (int i = 0; i < n; ++i) {
    const double mi = mass.coeff(i, i);
    if (!(mi > 0)) throw ValidationError("mass matrix must have positive diagonal");
    d[i] = std::sqrt(mi);
  }
  SparseMat a = stiffness;
  for (int col = 0; col < a.outerSize(); ++col)
    for (SparseMat::InnerIterator it(a, col); it; ++it)
      it.valueRef() /= d[it.row()] * d[it.col()];

  const Eigen::VectorXd kernel = d / d.norm();  // image of constants

  constexpr int kBlock = 4;
  auto sine_ramp = [n](int frequency) {
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i)
      v[i] = std::sin((i + 0.5) * frequency * std::numbers::pi / n);
    return v;
  };
  Eigen::MatrixXd u(n, kBlock);
  if (seed == 0) {
    for (int j = 0; j < 3; ++j) u.col(j) = sine_ramp(j + 1).cwiseProduct(d);
    Eigen::VectorXd ramp(n);
    for (int i = 0; i < n; ++i) ramp[i] = static_cast<double>(i) / n - 0.5;
    u.col(3) = ramp.cwiseProduct(d);
  } else {
    for (int j = 0; j < kBlock; ++j) u.col(j) = sine_ramp(seed + 2 * j + 1).cwiseProduct(d);
  }
  for (int j = 0; j < kBlock; ++j) {
    Eigen::VectorXd col = u.col(j);
    detail::project_out(col, kernel);
    u.col(j) = col;
  }
  {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(u);
    u = qr.householderQ() * Eigen::MatrixXd::Identity(n, kBlock);
  }

  Eigen::ConjugateGradient<SparseMat, Eigen::Lower | Eigen::Upper,
                           Eigen::DiagonalPreconditioner<double>>
      cg;
  cg.compute(a);
  cg.setMaxIterations(40 * static_cast<Eigen::Index>(n));

  SpectralResult result;
  Eigen::MatrixXd z = u;
  double theta_prev = 0.0;
  double theta0 = 0.0, residual = 0.0;
  Eigen::MatrixXd ritz_vectors;
  Eigen::VectorXd thetas;

  for (int iter = 1; iter <= max_iter; ++iter) {
    // Inner accuracy tightens as the outer iteration converges.
    const double inner_tol =
        std::clamp(residual > 0 ? 1e-2 * residual / std::max(theta0, 1e-300) : 1e-6, 1e-14, 1e-6);
    cg.setTolerance(inner_tol);
    for (int j = 0; j < kBlock; ++j) {
      Eigen::VectorXd rhs = u.col(j);
      detail::project_out(rhs, kernel);
      Eigen::VectorXd sol = cg.solveWithGuess(rhs, z.col(j));
      detail::project_out(sol, kernel);
      z.col(j) = sol;
    }
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(z);
    const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, kBlock);
    const Eigen::MatrixXd aq = a * q;
    Eigen::MatrixXd small = q.transpose() * aq;
    small = 0.5 * (small + small.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(small);
    thetas = es.eigenvalues();
    ritz_vectors = q * es.eigenvectors();
    const Eigen::MatrixXd a_ritz = aq * es.eigenvectors();

    theta0 = thetas[0];
    residual = (a_ritz.col(0) - theta0 * ritz_vectors.col(0)).norm();
    result.iterations = iter;
    u = ritz_vectors;
    z = ritz_vectors;  // warm start for the next solve

    if (iter > 1 && std::abs(theta0 - theta_prev) <= tol * std::abs(theta0) &&
        residual <= tol * std::abs(theta0)) {
      result.converged = true;
      break;
    }
    theta_prev = theta0;
  }

  if (!(theta0 > 0))
    throw ValidationError("first nonzero eigenvalue came out non-positive; mesh connected?");

  // Back to the original variable and a Rayleigh-quotient value certificate.
  Eigen::VectorXd y = ritz_vectors.col(0);
  Eigen::VectorXd x = y.cwiseQuotient(d);
  const double xmx = x.cwiseProduct(d.cwiseProduct(d)).dot(x);
  x /= std::sqrt(xmx);
  const double num = x.dot(stiffness * x);
  const double den = x.cwiseProduct(d.cwiseProduct(d)).dot(x);
  result.lambda1 = num / den;
  result.eigenvector.assign(x.data(), x.data() + n);
  result.residual = residual;
  result.ritz_values.assign(thetas.data(), thetas.data() + thetas.size());

  result.cluster_size = 0;
  double cluster_max = theta0;
  for (int j = 0; j < thetas.size(); ++j)
    if (thetas[j] <= 1.05 * theta0) {
      ++result.cluster_size;
      cluster_max = thetas[j];
    }
  result.cluster_width = (cluster_max - theta0) / theta0;
  result.sphere_like = result.cluster_size == 3;
  if (thetas.size() >= 3) result.gap_warning = (thetas[2] - thetas[1]) < tol * theta0;
  return result;
}

inline SpectralResult first_eigenvalue(const Mesh& mesh, double tol = 1e-10, int max_iter = 500,
                                       int seed = 0) {
  return first_eigenvalue(stiffness_matrix(mesh), mass_matrix(mesh), tol, max_iter, seed);
}

}  // namespace pinchlab
