#pragma once

// JSON serialization of reports. All floats are rounded to 9 significant
// digits before insertion so repeated runs serialize byte-identically.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "pinchlab/curvature.hpp"
#include "pinchlab/errors.hpp"
#include "pinchlab/pinch.hpp"
#include "pinchlab/version.hpp"

namespace pinchlab {

inline double round_sig9(double x) {
  if (!std::isfinite(x)) return x;
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", x);
  return std::strtod(buf, nullptr);
}

inline nlohmann::json report_to_json(const PinchReport& r) {
  using nlohmann::json;
  json j;
  j["mesh"] = {{"vertices", r.vertex_count},
               {"faces", r.face_count},
               {"euler_characteristic", r.euler}};
  j["sphere"] = {{"center",
                  {round_sig9(r.sphere.center[0]), round_sig9(r.sphere.center[1]),
                   round_sig9(r.sphere.center[2])}},
                 {"radius", round_sig9(r.sphere.radius)},
                 {"rms", round_sig9(r.sphere.rms_radial_error)}};
  j["radii"] = {{"fit", round_sig9(r.sphere.radius)},
                {"from_lambda1", round_sig9(r.radius_from_lambda1)},
                {"from_k", round_sig9(r.radius_from_k)}};
  if (r.theta_hat)
    j["theta_hat"] = round_sig9(*r.theta_hat);
  else
    j["theta_hat"] = nullptr;
  j["theta_note"] = r.theta_note;
  j["spectral"] = {{"lambda1", round_sig9(r.spectral.lambda1)},
                   {"residual", round_sig9(r.spectral.residual)},
                   {"iterations", r.spectral.iterations},
                   {"cluster_width", round_sig9(r.spectral.cluster_width)}};
  json hm = json::array();
  for (double v : r.functionals.hm_residual) hm.push_back(round_sig9(v));
  j["functionals"] = {
      {"volume", round_sig9(r.functionals.volume)},
      {"k_pr", round_sig9(r.functionals.k_pr)},
      {"hm_residual", hm},
      {"reilly",
       {{"lhs", round_sig9(r.functionals.reilly.lhs)},
        {"rhs", round_sig9(r.functionals.reilly.rhs)},
        {"deficit", round_sig9(r.functionals.reilly.deficit)}}},
      {"pinching",
       {{"absolute", round_sig9(r.functionals.pinching.absolute)},
        {"rhs", round_sig9(r.functionals.pinching.rhs)},
        {"dimensionless", round_sig9(r.functionals.pinching.dimensionless)}}},
      {"chain",
       {{"checked", r.functionals.chain.checked},
        {"excluded", r.functionals.chain.excluded},
        {"violations", r.functionals.chain.violations},
        {"worst_margin", std::isfinite(r.functionals.chain.worst_margin)
                             ? json(round_sig9(r.functionals.chain.worst_margin))
                             : json(nullptr)}}},
      {"p", round_sig9(r.functionals.p)},
      {"r", r.functionals.r}};
  j["deviations"] = {{"einstein_q", round_sig9(r.einstein_dev)},
                     {"b_minus_sqrt_k_2q", round_sig9(r.umbilic.b_dev_2q)},
                     {"tau_2q", round_sig9(r.umbilic.tau_2q)},
                     {"h2_minus_k_q", round_sig9(r.umbilic.h2_dev_q)},
                     {"b_minus_sqrt_k_inf", round_sig9(r.umbilic.b_dev_inf)}};
  j["cmc"] = {{"h_bar", round_sig9(r.cmc.h_bar)},
              {"s_bar", round_sig9(r.cmc.s_bar)},
              {"cmc_eps", round_sig9(r.cmc.cmc_eps)},
              {"scal_eps", round_sig9(r.cmc.scal_eps)},
              {"lemma_gap", round_sig9(r.cmc.lemma_gap)},
              {"gap_ratio", round_sig9(r.cmc.gap_ratio)}};
  j["warnings"] = r.warnings;

  json source;
  if (!r.source.empty()) {
    source = json::parse(r.source, nullptr, false);
    if (source.is_discarded()) source = r.source;  // plain path string
  }
  j["provenance"] = {{"source", source},
                     {"version", kVersion},
                     {"config",
                      {{"n", r.config.n},
                       {"p", round_sig9(r.config.p)},
                       {"q", round_sig9(r.config.q)},
                       {"r", r.config.r},
                       {"tol", round_sig9(r.config.tol)},
                       {"max_iter", r.config.max_iter},
                       {"normalized_deviations", r.config.normalized_deviations}}}};
  return j;
}

inline nlohmann::json curvature_field_to_json(const CurvatureField& curv) {
  using nlohmann::json;
  json verts = json::array();
  for (int v = 0; v < curv.vertex_count(); ++v)
    verts.push_back({{"kappa", {round_sig9(curv.kappa1[v]), round_sig9(curv.kappa2[v])}},
                     {"H", round_sig9(curv.mean[v])},
                     {"H2", round_sig9(curv.hr[2][v])},
                     {"scal", round_sig9(curv.scal[v])},
                     {"tau_norm", round_sig9(curv.tau_norm[v])},
                     {"K_defect", round_sig9(curv.angle_defect[v])}});
  return {{"n", curv.dim}, {"flagged", curv.flagged_count}, {"vertices", verts}};
}

inline std::string json_to_string(const nlohmann::json& j) { return j.dump(2) + "\n"; }

inline void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  out << content;
  if (!out) throw InputError("write failed for '" + path.string() + "'");
}

}  // namespace pinchlab
