// Command-line surface: generate test meshes, analyze a mesh or shape, run
// parameter sweeps. Exit codes: 0 ok, 1 unreadable input, 2 invalid
// arguments or data, 3 analysis-stage failure.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "pinchlab/pinchlab.hpp"

namespace {

using namespace pinchlab;

std::size_t vertex_cap_from_env() {
  if (const char* cap = std::getenv("PINCHLAB_MAX_VERTICES")) {
    try {
      const long long v = std::stoll(cap);
      if (v > 0) return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
    }
    std::cerr << "warning: ignoring unparsable PINCHLAB_MAX_VERTICES='" << cap << "'\n";
  }
  return kDefaultMaxVertices;
}

struct ShapeFlags {
  std::string kind;
  double radius = 1.0;
  double a = 1.0, b = 1.0, c = 1.5;
  double major = 2.0, minor = 0.5;
  double delta = 0.05;
  int l = 3, m = 2;

  void add_to(CLI::App* cmd, bool require_kind) {
    auto* opt = cmd->add_option("--shape", kind, "sphere | ellipsoid | torus | perturbed-sphere");
    if (require_kind) opt->required();
    cmd->add_option("--radius", radius, "sphere / perturbed-sphere radius");
    cmd->add_option("--a", a, "ellipsoid semi-axis a");
    cmd->add_option("--b", b, "ellipsoid semi-axis b");
    cmd->add_option("--c", c, "ellipsoid semi-axis c");
    cmd->add_option("--R,--major", major, "torus major radius");
    cmd->add_option("--r,--minor", minor, "torus minor radius");
    cmd->add_option("--delta", delta, "perturbation amplitude");
    cmd->add_option("--l", l, "spherical-harmonic degree");
    cmd->add_option("--m", m, "spherical-harmonic order");
  }

  AnalyticShape build() const {
    if (kind == "sphere") return Sphere{radius};
    if (kind == "ellipsoid") return Ellipsoid{a, b, c};
    if (kind == "torus") return Torus{major, minor};
    if (kind == "perturbed-sphere" || kind == "perturbed_sphere")
      return PerturbedSphere{radius, delta, l, m};
    throw ValidationError("unknown shape '" + kind + "'");
  }
};

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", x);
  return buf;
}

void print_summary(const PinchReport& rep) {
  std::ostringstream out;
  out << "mesh            " << rep.vertex_count << " vertices, " << rep.face_count
      << " faces, euler " << rep.euler << "\n"
      << "lambda1         " << fmt(rep.spectral.lambda1) << "  (residual "
      << fmt(rep.spectral.residual) << ", " << rep.spectral.iterations << " iterations)\n"
      << "k_pr            " << fmt(rep.functionals.k_pr) << "  (p=" << fmt(rep.config.p)
      << ", r=" << rep.config.r << ")\n"
      << "radii           fit " << fmt(rep.sphere.radius) << " | sqrt(n/lambda1) "
      << fmt(rep.radius_from_lambda1) << " | 1/sqrt(k_pr) " << fmt(rep.radius_from_k) << "\n"
      << "sphere fit rms  " << fmt(rep.sphere.rms_radial_error) << "\n"
      << "reilly          lhs " << fmt(rep.functionals.reilly.lhs) << ", rhs "
      << fmt(rep.functionals.reilly.rhs) << ", deficit " << fmt(rep.functionals.reilly.deficit)
      << "\n"
      << "pinching        " << fmt(rep.functionals.pinching.dimensionless)
      << " (dimensionless)\n"
      << "hm residual     ";
  for (std::size_t i = 0; i < rep.functionals.hm_residual.size(); ++i)
    out << (i ? ", " : "") << "r=" << i + 1 << ": " << fmt(rep.functionals.hm_residual[i]);
  out << "\n";
  if (rep.theta_hat)
    out << "theta_hat       " << fmt(*rep.theta_hat) << "\n";
  else
    out << "theta_hat       undefined: " << rep.theta_note << "\n";
  out << "deviations      einstein " << fmt(rep.einstein_dev) << ", |B-sqrt(k)g|_2q "
      << fmt(rep.umbilic.b_dev_2q) << ", |tau|_2q " << fmt(rep.umbilic.tau_2q)
      << ", |H^2-k|_q " << fmt(rep.umbilic.h2_dev_q) << ", |B-sqrt(k)g|_inf "
      << fmt(rep.umbilic.b_dev_inf) << "\n"
      << "cmc             h_bar " << fmt(rep.cmc.h_bar) << ", s_bar " << fmt(rep.cmc.s_bar)
      << ", cmc_eps " << fmt(rep.cmc.cmc_eps) << ", scal_eps " << fmt(rep.cmc.scal_eps)
      << ", lemma_gap " << fmt(rep.cmc.lemma_gap) << "\n"
      << "chain           " << rep.functionals.chain.violations << " violations, "
      << rep.functionals.chain.excluded << " excluded\n";
  for (const std::string& w : rep.warnings) out << "warning         " << w << "\n";
  std::cout << out.str();
}

// Values from --config that were not overridden on the command line.
void merge_config_file(const CLI::App* cmd, const std::string& path, AnalysisConfig& config,
                       std::optional<ShapeDescriptor>& shape) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("config file '" + path + "': " + e.what());
  }
  auto overridden = [&](const std::string& flag) {
    const CLI::Option* opt = cmd->get_option_no_throw(flag);
    return opt && opt->count() > 0;
  };
  try {
    if (j.contains("p") && !overridden("--p")) config.p = j["p"].get<double>();
    if (j.contains("q") && !overridden("--q")) config.q = j["q"].get<double>();
    if (j.contains("r") && !overridden("--order")) config.r = j["r"].get<int>();
    if (j.contains("tol") && !overridden("--tol")) config.tol = j["tol"].get<double>();
    if (j.contains("max_iter") && !overridden("--max-iter"))
      config.max_iter = j["max_iter"].get<int>();
    if (j.contains("normalized_deviations") && !overridden("--normalized-deviations"))
      config.normalized_deviations = j["normalized_deviations"].get<bool>();
    if (j.contains("shape") && !overridden("--shape")) shape = shape_from_json(j["shape"]);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("config file '" + path + "': " + e.what());
  }
}

int run(int argc, char** argv) {
  CLI::App app{"curvature, spectrum, and sphere-stability diagnostics for closed surfaces"};
  app.require_subcommand(1);

  // generate
  auto* gen = app.add_subcommand("generate", "sample an analytic shape and write a mesh");
  ShapeFlags gen_shape;
  gen_shape.add_to(gen, true);
  int gen_res = 4;
  std::string gen_out = "mesh.off";
  gen->add_option("--res", gen_res, "resolution (subdivision level or grid size)");
  gen->add_option("--out", gen_out, "output path (.off or .obj)");

  // analyze
  auto* ana = app.add_subcommand("analyze", "run the full diagnostic pipeline");
  ShapeFlags ana_shape;
  ana_shape.add_to(ana, false);
  std::string ana_mesh, ana_out = "report.json", ana_config, ana_curv_out;
  int ana_res = 4;
  AnalysisConfig config;
  ana->add_option("--mesh", ana_mesh, "input mesh path (.off or .obj)");
  ana->add_option("--res", ana_res, "resolution when --shape is used");
  ana->add_option("--out", ana_out, "report JSON path");
  ana->add_option("--curvature", ana_curv_out, "also write the per-vertex curvature field JSON");
  ana->add_option("--config", ana_config, "JSON config file (flags override)");
  ana->add_option("--p", config.p, "Hoelder exponent p >= 2");
  ana->add_option("--q", config.q, "deviation-norm exponent q");
  ana->add_option("--order", config.r, "curvature order r (1..n)");
  ana->add_option("--tol", config.tol, "eigensolver tolerance");
  ana->add_option("--max-iter", config.max_iter, "eigensolver iteration cap");
  ana->add_flag("--normalized-deviations,!--unnormalized-deviations",
                config.normalized_deviations, "deviation norms over dv/Vol (default on)");

  // sweep
  auto* swp = app.add_subcommand("sweep", "analyze a family of shapes and write CSV + SVG");
  ShapeFlags swp_shape;
  swp_shape.add_to(swp, true);
  std::string swp_param, swp_values, swp_out = "sweep.csv", swp_config;
  int swp_res = 4;
  AnalysisConfig swp_cfg;
  swp->add_option("--param", swp_param, "delta | radius | resolution")->required();
  swp->add_option("--values", swp_values, "comma-separated increasing values")->required();
  swp->add_option("--res", swp_res, "fixed resolution (unless sweeping it)");
  swp->add_option("--out", swp_out, "output CSV path");
  swp->add_option("--config", swp_config, "JSON config file (flags override)");
  swp->add_option("--p", swp_cfg.p, "Hoelder exponent p >= 2");
  swp->add_option("--q", swp_cfg.q, "deviation-norm exponent q");
  swp->add_option("--order", swp_cfg.r, "curvature order r (1..n)");
  swp->add_option("--tol", swp_cfg.tol, "eigensolver tolerance");
  swp->add_option("--max-iter", swp_cfg.max_iter, "eigensolver iteration cap");
  swp->add_flag("--normalized-deviations,!--unnormalized-deviations",
                swp_cfg.normalized_deviations, "deviation norms over dv/Vol (default on)");

  auto* ver = app.add_subcommand("version", "print the version");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  const std::size_t cap = vertex_cap_from_env();

  if (*ver) {
    std::cout << "pinchlab " << kVersion << "\n";
    return 0;
  }

  if (*gen) {
    const Mesh mesh = generate(gen_shape.build(), gen_res, cap);
    save_mesh(mesh, gen_out);
    std::cout << "vertices: " << mesh.vertex_count() << "\nfaces: " << mesh.face_count()
              << "\neuler_characteristic: " << euler_characteristic(mesh) << "\nwrote: " << gen_out
              << "\n";
    return 0;
  }

  if (*ana) {
    std::optional<ShapeDescriptor> desc;
    if (!ana_config.empty()) merge_config_file(ana, ana_config, config, desc);
    if (ana->get_option("--shape")->count() > 0)
      desc = ShapeDescriptor{ana_shape.build(), ana_res};
    if (desc && !ana_mesh.empty())
      throw ValidationError("give either --mesh or --shape, not both");

    Mesh mesh;
    std::string source;
    if (desc) {
      mesh = generate(desc->shape, desc->resolution, cap);
      source = shape_to_json(*desc).dump();
    } else if (!ana_mesh.empty()) {
      std::vector<std::string> warnings;
      mesh = load_mesh(ana_mesh, &warnings);
      for (const std::string& w : warnings) std::cerr << "warning: " << w << "\n";
      source = ana_mesh;
    } else {
      throw ValidationError("analyze needs --mesh or --shape");
    }

    if (config.q <= config.n / 2.0)
      std::cerr << "warning: q <= n/2: Ricci-based eigenvalue lower bound does not apply\n";

    const PinchReport report = analyze(mesh, config, source);
    write_text_file(ana_out, json_to_string(report_to_json(report)));
    if (!ana_curv_out.empty()) {
      const Mesh recentered = centroid_recenter(mesh);
      const auto frames = vertex_frames(recentered);
      write_text_file(ana_curv_out,
                      json_to_string(curvature_field_to_json(
                          compute_curvature_field(recentered, frames))));
    }
    print_summary(report);
    std::cout << "wrote: " << ana_out << "\n";
    return 0;
  }

  // sweep
  std::optional<ShapeDescriptor> swp_desc;
  if (!swp_config.empty()) merge_config_file(swp, swp_config, swp_cfg, swp_desc);
  SweepSpec spec;
  spec.base = swp_desc ? *swp_desc : ShapeDescriptor{swp_shape.build(), swp_res};
  if (swp->get_option("--shape")->count() > 0) spec.base = ShapeDescriptor{swp_shape.build(), swp_res};
  spec.param = swp_param;
  spec.config = swp_cfg;
  std::stringstream vs(swp_values);
  std::string tok;
  while (std::getline(vs, tok, ',')) {
    if (tok.empty()) continue;
    try {
      spec.values.push_back(std::stod(tok));
    } catch (const std::exception&) {
      throw ValidationError("unparsable sweep value '" + tok + "'");
    }
  }

  const SweepResult result = run_sweep(spec, cap);
  write_text_file(swp_out, sweep_to_csv(result));
  const auto svgs = write_sweep_svgs(result, swp_out);
  for (const SweepRow& row : result.rows)
    std::cout << spec.param << "=" << fmt(row.value) << "  "
              << (row.ok ? "ok" : std::string("failed: ") + row.note) << "\n";
  std::cout << "wrote: " << swp_out << " and " << svgs.size() << " charts\n";
  if (result.succeeded == 0) throw PipelineError("sweep", "no row succeeded");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const pinchlab::InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const pinchlab::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const pinchlab::PipelineError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
