// Minimal library walkthrough: sample a sphere, estimate curvature, get the
// first Laplace eigenvalue, and print the headline diagnostics.

#include <iostream>

#include "pinchlab/pinchlab.hpp"

int main() {
  using namespace pinchlab;

  const Mesh mesh = centroid_recenter(generate(Sphere{1.0}, 3));
  const auto frames = vertex_frames(mesh);
  const CurvatureField curv = compute_curvature_field(mesh, frames);
  const SpectralResult spectral = first_eigenvalue(mesh);

  std::cout << "vertices: " << mesh.vertex_count() << "\n"
            << "area:     " << surface_volume(frames) << "  (4*pi = " << 4 * std::numbers::pi
            << ")\n"
            << "lambda1:  " << spectral.lambda1 << "  (sphere value n/R^2 = 2)\n"
            << "k_{2,2}:  " << k_constant(frames, curv, 2.0, 2) << "  (sphere value 1/R^2 = 1)\n";

  const PinchReport report = analyze(mesh, AnalysisConfig{});
  std::cout << "pinching deficit (dimensionless): " << report.functionals.pinching.dimensionless
            << "\n"
            << "distortion theta_hat:             "
            << (report.theta_hat ? *report.theta_hat : -1.0) << "\n";
  return 0;
}
