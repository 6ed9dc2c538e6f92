// Acceptance suite: runs each release criterion and prints one PASS/FAIL
// line per criterion. Exits nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "pinchlab/pinchlab.hpp"
#include "support.hpp"

using namespace pinchlab;
namespace fs = std::filesystem;

namespace {

struct Criterion {
  std::vector<std::string> failures;
  std::vector<std::string> notes;

  void check(bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  }
  void note(const std::string& text) { notes.push_back(text); }
};

int g_failed = 0;

void run_criterion(int number, const std::string& title,
                   const std::function<void(Criterion&)>& body) {
  Criterion c;
  try {
    body(c);
  } catch (const std::exception& e) {
    c.failures.push_back(std::string("exception: ") + e.what());
  }
  if (c.failures.empty()) {
    std::printf("PASS  criterion %d: %s", number, title.c_str());
  } else {
    ++g_failed;
    std::printf("FAIL  criterion %d: %s", number, title.c_str());
  }
  for (const std::string& n : c.notes) std::printf("  [%s]", n.c_str());
  std::printf("\n");
  for (const std::string& f : c.failures) std::printf("      - %s\n", f.c_str());
  std::fflush(stdout);
}

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", x);
  return buf;
}

struct Surface {
  Mesh mesh;
  std::vector<VertexFrame> frames;
  CurvatureField curv;
};

Surface make_surface(const Mesh& raw) {
  Surface s;
  s.mesh = centroid_recenter(raw);
  s.frames = vertex_frames(s.mesh);
  s.curv = compute_curvature_field(s.mesh, s.frames);
  return s;
}

double sup_norm_minus(const std::vector<double>& field, double target) {
  double worst = 0.0;
  for (double f : field) worst = std::max(worst, std::abs(f - target));
  return worst;
}

// Golden values for torus(2, 0.5) at resolution 64 under the default config,
// frozen from the reference pipeline run on this mesh (tolerance 1e-6
// relative; the pipeline is deterministic for a fixed build).
struct TorusGolden {
  double lambda1 = 0.25628621115326;
  double pinch_dimless = -0.82428219588771;
  double tau_4 = 1.0464811822951;
  double einstein = 1.0228526165425;
  double reilly_ratio = -0.75955560799216;  // deficit / rhs at r = 2
  double rms_fit = 0.3514535071514;
};

bool close_rel(double a, double b, double rel) {
  return std::abs(a - b) <= rel * std::max(std::abs(a), std::abs(b));
}

}  // namespace

int main() {
  const AnalysisConfig defaults;

  // ---- shared analyses --------------------------------------------------
  const auto t_sphere_start = std::chrono::steady_clock::now();
  const Mesh sphere4_raw = generate(Sphere{1.0}, 4);
  const PinchReport sphere_report = analyze(sphere4_raw, defaults);
  const Surface sphere4 = make_surface(sphere4_raw);
  const double sphere_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_sphere_start).count();

  run_criterion(1, "unit-sphere battery (resolution 4)", [&](Criterion& c) {
    c.note("runtime " + fmt(sphere_seconds) + " s");
    c.check(sphere_seconds < 10.0, "runtime exceeded 10 s: " + fmt(sphere_seconds));

    const double h_err = sup_norm_minus(sphere4.curv.mean, 1.0);
    c.check(h_err <= 0.02, "||H - 1||_inf = " + fmt(h_err) + " > 0.02");

    const double l1 = sphere_report.spectral.lambda1;
    c.check(l1 >= 1.98 && l1 <= 2.02, "lambda1 = " + fmt(l1) + " outside [1.98, 2.02]");

    for (int r : {1, 2}) {
      const double k = k_constant(sphere4.frames, sphere4.curv, 2, r);
      c.check(k >= 0.98 && k <= 1.02,
              "k_{2," + std::to_string(r) + "} = " + fmt(k) + " outside [0.98, 1.02]");
      const PinchingDeficit pd = pinching_deficit(sphere4.frames, sphere4.curv, l1, 2, r);
      c.check(pd.dimensionless >= -0.03 && pd.dimensionless <= 0.005,
              "pinching deficit r=" + std::to_string(r) + " = " + fmt(pd.dimensionless) +
                  " outside [-0.03, 0.005]");
      const double hm = hsiung_minkowski_residual(sphere4.mesh, sphere4.frames, sphere4.curv, r);
      c.check(std::abs(hm) <= 0.01,
              "|hm_residual| r=" + std::to_string(r) + " = " + fmt(std::abs(hm)) + " > 0.01");
    }

    double tau_inf = 0.0;
    for (int v = 0; v < sphere4.curv.vertex_count(); ++v)
      tau_inf = std::max(tau_inf, operator_norm_sym2(sphere4.curv.tau[v]));
    c.check(tau_inf <= 0.03, "||tau||_inf = " + fmt(tau_inf) + " > 0.03");

    const double einstein =
        einstein_deviation(sphere4.frames, sphere4.curv, 1.0, 2.0, NormSpec{2.0, true});
    c.check(einstein <= 0.05, "einstein deviation = " + fmt(einstein) + " > 0.05");

    c.check(sphere_report.theta_hat.has_value(), "theta_hat undefined on the sphere");
    if (sphere_report.theta_hat)
      c.check(*sphere_report.theta_hat <= 0.02,
              "theta_hat = " + fmt(*sphere_report.theta_hat) + " > 0.02");

    c.check(sphere_report.cmc.lemma_gap <= 0.05,
            "lemma_gap = " + fmt(sphere_report.cmc.lemma_gap) + " > 0.05");
  });

  run_criterion(2, "radius-2 sphere scaling", [&](Criterion& c) {
    const Mesh big_raw = generate(Sphere{2.0}, 4);
    const PinchReport rep = analyze(big_raw, defaults);
    const Surface big = make_surface(big_raw);

    const double l1 = rep.spectral.lambda1;
    c.check(l1 >= 0.495 && l1 <= 0.505, "lambda1 = " + fmt(l1) + " outside [0.495, 0.505]");

    for (int r : {1, 2}) {
      const double k = k_constant(big.frames, big.curv, 2, r);
      c.check(k >= 0.245 && k <= 0.255,
              "k_{2," + std::to_string(r) + "} = " + fmt(k) + " outside [0.245, 0.255]");
    }

    c.check(rep.cmc.s_bar >= 0.48 && rep.cmc.s_bar <= 0.52,
            "s_bar = " + fmt(rep.cmc.s_bar) + " outside [0.48, 0.52]");
    c.check(rep.cmc.lemma_gap <= 0.02,
            "|s_bar - n(n-1) h_bar^2| = " + fmt(rep.cmc.lemma_gap) + " > 0.02");

    for (int r : {1, 2}) {
      const double small_d =
          pinching_deficit(sphere4.frames, sphere4.curv, sphere_report.spectral.lambda1, 2, r)
              .dimensionless;
      const double big_d = pinching_deficit(big.frames, big.curv, l1, 2, r).dimensionless;
      c.check(std::abs(small_d - big_d) <= 0.01,
              "dimensionless deficit r=" + std::to_string(r) + " differs by " +
                  fmt(std::abs(small_d - big_d)) + " > 0.01 across scales");
    }
  });

  // battery of analyzed meshes used by criteria 3 and 4
  struct Named {
    std::string name;
    Mesh mesh;
  };
  std::vector<Named> battery;
  battery.push_back({"sphere", sphere4_raw});
  battery.push_back({"sphere_r2", generate(Sphere{2.0}, 4)});
  battery.push_back({"ellipsoid", generate(Ellipsoid{1.0, 1.0, 1.5}, 4)});
  battery.push_back({"torus", generate(Torus{2.0, 0.5}, 64)});
  for (double delta : {0.05, 0.1})
    battery.push_back(
        {"perturbed_" + fmt(delta), generate(PerturbedSphere{1.0, delta, 3, 2}, 4)});

  run_criterion(3, "exact identities at machine precision", [&](Criterion& c) {
    for (const Named& item : battery) {
      const Surface s = make_surface(item.mesh);
      double worst_trace = 0.0, worst_ric = 0.0, worst_tau = 0.0;
      for (int v = 0; v < s.curv.vertex_count(); ++v) {
        worst_trace = std::max(worst_trace, std::abs(s.curv.tau[v].trace()));
        Eigen::SelfAdjointEigenSolver<Mat2> es(s.curv.ricci[v]);
        const double scale = std::max(1.0, std::abs(s.curv.hr[2][v]));
        worst_ric = std::max({worst_ric,
                              std::abs(es.eigenvalues()[0] - s.curv.hr[2][v]) / scale,
                              std::abs(es.eigenvalues()[1] - s.curv.hr[2][v]) / scale});
        const double lhs = s.curv.tau_norm[v] * s.curv.tau_norm[v];
        const double rhs = 2.0 * s.curv.mean[v] * s.curv.mean[v] - s.curv.scal[v];
        worst_tau =
            std::max(worst_tau, std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs)));
      }
      c.check(worst_trace <= 1e-10, item.name + ": max |trace tau| = " + fmt(worst_trace));
      c.check(worst_ric <= 1e-12, item.name + ": Ricci eigenvalues off H2 by " + fmt(worst_ric));
      c.check(worst_tau <= 1e-12,
              item.name + ": |tau|^2 identity off by " + fmt(worst_tau) + " (relative)");

      const auto areas = vertex_areas(s.mesh);
      const auto defect = angle_defect_gauss(s.mesh);
      double total = 0.0;
      for (int v = 0; v < s.mesh.vertex_count(); ++v) total += defect[v] * areas[v];
      const double expected = 2.0 * std::numbers::pi * euler_characteristic(s.mesh);
      c.check(std::abs(total - expected) <= 1e-9,
              item.name + ": Gauss-Bonnet defect total off by " + fmt(total - expected));

      const SparseMat k = stiffness_matrix(s.mesh);
      const SparseMat m = mass_matrix(s.mesh);
      const SpectralResult spec = first_eigenvalue(k, m);
      Eigen::Map<const Eigen::VectorXd> u(spec.eigenvector.data(), s.mesh.vertex_count());
      const double rayleigh = u.dot(k * u) / u.dot(m * u);
      c.check(std::abs(rayleigh - spec.lambda1) <= 1e-9 * spec.lambda1,
              item.name + ": Rayleigh certificate off by " +
                  fmt(std::abs(rayleigh - spec.lambda1) / spec.lambda1) + " (relative)");
    }
  });

  run_criterion(4, "inequality directions on all shapes", [&](Criterion& c) {
    for (const Named& item : battery) {
      const Surface s = make_surface(item.mesh);
      const double l1 = first_eigenvalue(s.mesh).lambda1;
      for (int r : {1, 2}) {
        const ReillyCheck reilly = reilly_check(s.frames, s.curv, l1, r);
        c.check(reilly.deficit <= 0.01 * reilly.rhs,
                item.name + ": Reilly deficit r=" + std::to_string(r) + " = " +
                    fmt(reilly.deficit) + " above 0.01 rhs");
        const PinchingDeficit pinch = pinching_deficit(s.frames, s.curv, l1, 2, r);
        c.check(pinch.absolute <= 0.01 * pinch.rhs,
                item.name + ": pinching deficit r=" + std::to_string(r) + " = " +
                    fmt(pinch.absolute) + " above 0.01 rhs");
      }
      const ChainReport chain = chain_inequality_check(s.curv);
      c.check(chain.violations == 0, item.name + ": " + std::to_string(chain.violations) +
                                         " chain violations where H2 > 0, H > 0");
    }
  });

  run_criterion(5, "torus control with frozen golden values", [&](Criterion& c) {
    const TorusGolden golden;
    const auto t0 = std::chrono::steady_clock::now();
    const Mesh torus = generate(Torus{2.0, 0.5}, 64);
    const PinchReport rep = analyze(torus, defaults);
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    c.note("runtime " + fmt(seconds) + " s");
    c.check(seconds < 30.0, "runtime exceeded 30 s: " + fmt(seconds));

    c.check(rep.functionals.pinching.dimensionless <= -0.1,
            "pinching deficit = " + fmt(rep.functionals.pinching.dimensionless) + " > -0.1");
    c.check(rep.umbilic.tau_2q >= 0.5, "||tau||_4 = " + fmt(rep.umbilic.tau_2q) + " < 0.5");
    c.check(!rep.theta_hat.has_value(), "star-shapedness failure was not detected");
    c.check(rep.theta_note.find("not star-shaped") != std::string::npos,
            "star-shapedness note missing");

    c.check(close_rel(rep.spectral.lambda1, golden.lambda1, 1e-6),
            "lambda1 = " + fmt(rep.spectral.lambda1) + " drifted from golden " +
                fmt(golden.lambda1));
    c.check(close_rel(rep.functionals.pinching.dimensionless, golden.pinch_dimless, 1e-6),
            "pinching = " + fmt(rep.functionals.pinching.dimensionless) +
                " drifted from golden " + fmt(golden.pinch_dimless));
    c.check(close_rel(rep.umbilic.tau_2q, golden.tau_4, 1e-6),
            "tau_4 = " + fmt(rep.umbilic.tau_2q) + " drifted from golden " + fmt(golden.tau_4));
    c.check(close_rel(rep.einstein_dev, golden.einstein, 1e-6),
            "einstein = " + fmt(rep.einstein_dev) + " drifted from golden " +
                fmt(golden.einstein));
    c.check(
        close_rel(rep.functionals.reilly.deficit / rep.functionals.reilly.rhs,
                  golden.reilly_ratio, 1e-6),
        "reilly ratio = " + fmt(rep.functionals.reilly.deficit / rep.functionals.reilly.rhs) +
            " drifted from golden " + fmt(golden.reilly_ratio));
    c.check(close_rel(rep.sphere.rms_radial_error, golden.rms_fit, 1e-6),
            "rms fit = " + fmt(rep.sphere.rms_radial_error) + " drifted from golden " +
                fmt(golden.rms_fit));
  });

  run_criterion(6, "convergence under refinement", [&](Criterion& c) {
    std::vector<double> hm, l1_err, h_err, theta;
    for (int level : {2, 3, 4}) {
      const Surface s = make_surface(generate(Sphere{1.0}, level));
      const PinchReport rep = analyze(generate(Sphere{1.0}, level), defaults);
      hm.push_back(std::abs(hsiung_minkowski_residual(s.mesh, s.frames, s.curv, 1)));
      l1_err.push_back(std::abs(rep.spectral.lambda1 - 2.0));
      h_err.push_back(sup_norm_minus(s.curv.mean, 1.0));
      theta.push_back(rep.theta_hat ? *rep.theta_hat
                                    : std::numeric_limits<double>::quiet_NaN());
    }
    auto strictly_decreasing = [](const std::vector<double>& v) {
      for (std::size_t i = 1; i < v.size(); ++i)
        if (!(v[i] < v[i - 1])) return false;
      return true;
    };
    c.note("hm " + fmt(hm[0]) + " > " + fmt(hm[1]) + " > " + fmt(hm[2]));
    c.note("lambda1 err " + fmt(l1_err[0]) + " > " + fmt(l1_err[1]) + " > " + fmt(l1_err[2]));
    c.note("H err " + fmt(h_err[0]) + " > " + fmt(h_err[1]) + " > " + fmt(h_err[2]));
    c.note("theta " + fmt(theta[0]) + " / " + fmt(theta[1]) + " / " + fmt(theta[2]));
    c.check(strictly_decreasing(hm), "hm_residual not strictly decreasing");
    c.check(strictly_decreasing(l1_err), "|lambda1 - 2| not strictly decreasing");
    c.check(strictly_decreasing(h_err), "||H - 1||_inf not strictly decreasing");
    c.check(strictly_decreasing(theta),
            "theta_hat not strictly decreasing (machine-noise plateau: the distortion of an "
            "exactly inscribed icosphere is identically zero by construction)");
    c.check(l1_err[1] <= 0.5 * l1_err[0] && l1_err[2] <= 0.5 * l1_err[1],
            "|lambda1 - 2| does not halve per level");
  });

  run_criterion(7, "stability trend over the perturbation sweep", [&](Criterion& c) {
    const std::vector<double> deltas{0.0, 0.02, 0.05, 0.08, 0.1};
    std::vector<double> einstein, pinch, theta, tau, cmc, scal, ratio;
    for (double d : deltas) {
      const PinchReport rep = analyze(generate(PerturbedSphere{1.0, d, 3, 2}, 4), defaults);
      einstein.push_back(rep.einstein_dev);
      pinch.push_back(std::abs(rep.functionals.pinching.dimensionless));
      theta.push_back(rep.theta_hat ? *rep.theta_hat : 1e9);
      tau.push_back(rep.umbilic.tau_2q);
      cmc.push_back(rep.cmc.cmc_eps);
      scal.push_back(rep.cmc.scal_eps);
      ratio.push_back(rep.cmc.gap_ratio);
    }
    const std::vector<std::pair<const char*, const std::vector<double>*>> sequences = {
        {"einstein_dev", &einstein}, {"|pinching deficit|", &pinch}, {"theta_hat", &theta},
        {"tau_4", &tau},             {"cmc_eps", &cmc},              {"scal_eps", &scal}};
    for (const auto& [name, seq] : sequences) {
      const double rho = testsupport::spearman(deltas, *seq);
      c.check(rho >= 0.9,
              std::string(name) + " Spearman vs delta = " + fmt(rho) + " < 0.9");
    }
    double worst_ratio = 0.0;
    for (double r : ratio) worst_ratio = std::max(worst_ratio, r);
    c.note("max lemma_gap / max(cmc_eps, scal_eps) = " + fmt(worst_ratio));
    c.check(std::isfinite(worst_ratio) && worst_ratio > 0.0,
            "lemma-gap ratio is not a finite positive constant");
  });

  run_criterion(8, "deterministic reports and stable goldens", [&](Criterion& c) {
    const fs::path dir = fs::temp_directory_path() / "pinchlab_acceptance";
    fs::remove_all(dir);
    fs::create_directories(dir);
    auto shell = [&](const std::string& args) {
      const std::string cmd = std::string(PINCHLAB_CLI) + " " + args + " > " +
                              (dir / "log.txt").string() + " 2>&1";
      return std::system(cmd.c_str());
    };
    auto slurp = [](const fs::path& p) {
      std::ifstream in(p, std::ios::binary);
      std::stringstream ss;
      ss << in.rdbuf();
      return ss.str();
    };

    const std::string analyze_args = "analyze --shape perturbed-sphere --delta 0.05 --res 3";
    c.check(shell(analyze_args + " --out " + (dir / "a.json").string()) == 0,
            "analyze run 1 failed");
    c.check(shell(analyze_args + " --out " + (dir / "b.json").string()) == 0,
            "analyze run 2 failed");
    c.check(!slurp(dir / "a.json").empty() && slurp(dir / "a.json") == slurp(dir / "b.json"),
            "repeated analyze runs are not byte-identical");

    const std::string sweep_args =
        "sweep --shape perturbed-sphere --param delta --values 0,0.05 --res 2 --out ";
    c.check(shell(sweep_args + (dir / "s1.csv").string()) == 0, "sweep run 1 failed");
    c.check(shell(sweep_args + (dir / "s2.csv").string()) == 0, "sweep run 2 failed");
    c.check(!slurp(dir / "s1.csv").empty() && slurp(dir / "s1.csv") == slurp(dir / "s2.csv"),
            "repeated sweep runs are not byte-identical");
    for (const char* suffix : {"_spectral.svg", "_deficits.svg", "_deviations.svg",
                               "_distortion.svg", "_cmc.svg"})
      c.check(slurp(dir / ("s1" + std::string(suffix))) ==
                  slurp(dir / ("s2" + std::string(suffix))),
              std::string("chart ") + suffix + " differs between runs");

    const std::string header = slurp(fs::path(PINCHLAB_GOLDEN_DIR) / "sweep_header.txt");
    const std::string csv = slurp(dir / "s1.csv");
    c.check(csv.substr(0, csv.find('\n') + 1) == header,
            "CSV header does not match the golden contract");
  });

  std::printf("%s: %d of 8 criteria passed\n", g_failed == 0 ? "OK" : "RED", 8 - g_failed);
  return g_failed == 0 ? 0 : 1;
}
