#pragma once

// Integral functionals over the discrete measure: Lp norms, support
// function, Hsiung-Minkowski residual, the k_{p,r} constant, the Reilly
// eigenvalue inequality, its Hoelder-refined pinching form, and the chain
// inequality between higher mean curvatures.

#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "pinchlab/curvature.hpp"
#include "pinchlab/errors.hpp"
#include "pinchlab/mesh.hpp"

namespace pinchlab {

/// Lp norm convention: `normalized` integrates against the probability
/// measure dv/Vol, otherwise plain dv. Exponent may be infinity.
struct NormSpec {
  double exponent = 2.0;
  bool normalized = false;
};

inline double integrate(const std::vector<VertexFrame>& frames, std::span<const double> field) {
  if (field.size() != frames.size())
    throw ValidationError("field and mesh disagree on vertex count");
  double sum = 0.0;
  for (std::size_t v = 0; v < frames.size(); ++v) sum += field[v] * frames[v].area;
  return sum;
}

inline double surface_volume(const std::vector<VertexFrame>& frames) {
  double sum = 0.0;
  for (const VertexFrame& fr : frames) sum += fr.area;
  return sum;
}

inline double lp_norm(const std::vector<VertexFrame>& frames, std::span<const double> field,
                      const NormSpec& spec) {
  if (!(spec.exponent >= 1.0)) throw ValidationError("norm exponent must be >= 1");
  if (field.size() != frames.size())
    throw ValidationError("field and mesh disagree on vertex count");
  if (std::isinf(spec.exponent)) {
    double sup = 0.0;
    for (double f : field) sup = std::max(sup, std::abs(f));
    return sup;
  }
  double sum = 0.0;
  for (std::size_t v = 0; v < frames.size(); ++v)
    sum += std::pow(std::abs(field[v]), spec.exponent) * frames[v].area;
  if (spec.normalized) sum /= surface_volume(frames);
  return std::pow(sum, 1.0 / spec.exponent);
}

/// Per-vertex support function <X, nu> (mesh assumed recentered).
inline std::vector<double> support_function(const Mesh& mesh,
                                            const std::vector<VertexFrame>& frames) {
  std::vector<double> s(mesh.vertex_count());
  for (int v = 0; v < mesh.vertex_count(); ++v) s[v] = mesh.vertices[v].dot(frames[v].normal);
  return s;
}

/// Volume-normalized residual of the Hsiung-Minkowski identity
/// integral(H_{r-1} - H_r <X, nu>) dv = 0, which holds on every closed
/// hypersurface; the discrete value measures total estimation error.
inline double hsiung_minkowski_residual(const Mesh& mesh, const std::vector<VertexFrame>& frames,
                                        const CurvatureField& curv, int r) {
  if (r < 1 || r > curv.dim)
    throw ValidationError("curvature order r must be in 1.." + std::to_string(curv.dim));
  const std::vector<double> support = support_function(mesh, frames);
  std::vector<double> integrand(mesh.vertex_count());
  for (int v = 0; v < mesh.vertex_count(); ++v)
    integrand[v] = curv.hr[r - 1][v] - curv.hr[r][v] * support[v];
  return integrate(frames, integrand) / surface_volume(frames);
}

/// k_{p,r} = ||H_r||_{2p}^2 Vol^{2 - 1/p} / (integral H_{r-1} dv)^2 with
/// unnormalized norms. Equals 1/R^2 on a round sphere of radius R.
inline double k_constant(const std::vector<VertexFrame>& frames, const CurvatureField& curv,
                         double p, int r) {
  if (!(p >= 2.0)) throw ValidationError("k constant requires p >= 2");
  if (r < 1 || r > curv.dim)
    throw ValidationError("curvature order r must be in 1.." + std::to_string(curv.dim));
  const double vol = surface_volume(frames);
  const double hr_norm = lp_norm(frames, curv.hr[r], NormSpec{2.0 * p, false});
  const double denom = integrate(frames, curv.hr[r - 1]);
  if (std::abs(denom) < 1e-300)
    throw ValidationError("integral of H_{r-1} vanishes; k constant undefined");
  return hr_norm * hr_norm * std::pow(vol, 2.0 - 1.0 / p) / (denom * denom);
}

/// Reilly upper bound in scale-consistent form:
/// lambda1 (integral H_{r-1} dv)^2 <= n Vol integral H_r^2 dv,
/// with equality exactly on round spheres. deficit = lhs - rhs <= 0.
struct ReillyCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  double deficit = 0.0;
};

inline ReillyCheck reilly_check(const std::vector<VertexFrame>& frames,
                                const CurvatureField& curv, double lambda1, int r) {
  if (r < 1 || r > curv.dim)
    throw ValidationError("curvature order r must be in 1.." + std::to_string(curv.dim));
  const double n = curv.dim;
  const double moment = integrate(frames, curv.hr[r - 1]);
  std::vector<double> hr_sq(curv.hr[r].size());
  for (std::size_t v = 0; v < hr_sq.size(); ++v) hr_sq[v] = curv.hr[r][v] * curv.hr[r][v];
  ReillyCheck check;
  check.lhs = lambda1 * moment * moment;
  check.rhs = n * surface_volume(frames) * integrate(frames, hr_sq);
  check.deficit = check.lhs - check.rhs;
  return check;
}

/// Hoelder-refined pinching quantity
/// lambda1 (integral H_{r-1} dv)^2 - n Vol^{2-1/p} ||H_r||_{2p}^2  (<= 0),
/// zero on round spheres for every p. `dimensionless` divides by the
/// subtracted term.
struct PinchingDeficit {
  double absolute = 0.0;
  double rhs = 0.0;
  double dimensionless = 0.0;
};

inline PinchingDeficit pinching_deficit(const std::vector<VertexFrame>& frames,
                                        const CurvatureField& curv, double lambda1, double p,
                                        int r) {
  if (!(p >= 2.0)) throw ValidationError("pinching deficit requires p >= 2");
  if (r < 1 || r > curv.dim)
    throw ValidationError("curvature order r must be in 1.." + std::to_string(curv.dim));
  const double n = curv.dim;
  const double moment = integrate(frames, curv.hr[r - 1]);
  const double hr_norm = lp_norm(frames, curv.hr[r], NormSpec{2.0 * p, false});
  PinchingDeficit deficit;
  deficit.rhs = n * std::pow(surface_volume(frames), 2.0 - 1.0 / p) * hr_norm * hr_norm;
  deficit.absolute = lambda1 * moment * moment - deficit.rhs;
  if (!(deficit.rhs > 0))
    throw ValidationError("pinching denominator vanishes (H_r identically zero?)");
  deficit.dimensionless = deficit.absolute / deficit.rhs;
  return deficit;
}

/// Checks sqrt(H_2) <= H (1 + tol) at every vertex where H_2 > 0 and H > 0;
/// vertices failing the sign condition are excluded, not violations.
struct ChainReport {
  int checked = 0;
  int excluded = 0;
  int violations = 0;
  double worst_margin = -std::numeric_limits<double>::infinity();  // max (sqrt(H2) - H)/H
};

inline ChainReport chain_inequality_check(const CurvatureField& curv, double tol = 1e-12) {
  ChainReport report;
  for (int v = 0; v < curv.vertex_count(); ++v) {
    const double h = curv.hr[1][v], h2 = curv.hr[2][v];
    if (!(h2 > 0.0) || !(h > 0.0)) {
      ++report.excluded;
      continue;
    }
    ++report.checked;
    const double margin = (std::sqrt(h2) - h) / h;
    report.worst_margin = std::max(report.worst_margin, margin);
    if (margin > tol) ++report.violations;
  }
  return report;
}

/// Aggregate of the integral diagnostics for one (p, r) choice.
struct DeficitReport {
  double volume = 0.0;
  double k_pr = 0.0;
  std::vector<double> hm_residual;  // index r-1, for r = 1..n
  ReillyCheck reilly;
  PinchingDeficit pinching;
  ChainReport chain;
  double p = 2.0;
  int r = 2;
};

inline DeficitReport make_deficit_report(const Mesh& mesh, const std::vector<VertexFrame>& frames,
                                         const CurvatureField& curv, double lambda1, double p,
                                         int r) {
  DeficitReport report;
  report.p = p;
  report.r = r;
  report.volume = surface_volume(frames);
  report.k_pr = k_constant(frames, curv, p, r);
  for (int rr = 1; rr <= curv.dim; ++rr)
    report.hm_residual.push_back(hsiung_minkowski_residual(mesh, frames, curv, rr));
  report.reilly = reilly_check(frames, curv, lambda1, r);
  report.pinching = pinching_deficit(frames, curv, lambda1, p, r);
  report.chain = chain_inequality_check(curv);
  return report;
}

}  // namespace pinchlab
