#pragma once

// Parameter sweeps: one analysis per value, flattened into CSV columns plus
// dependency-free SVG line charts. Output is a pure function of the inputs
// (fixed float formats, no timestamps).

#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "pinchlab/errors.hpp"
#include "pinchlab/pinch.hpp"
#include "pinchlab/report_json.hpp"
#include "pinchlab/shapes.hpp"

namespace pinchlab {

inline constexpr const char* kSweepCsvHeader =
    "param,lambda1,k_pr,pinch_deficit,hm_residual,einstein_dev,tau_2q,h2_dev,theta_hat,"
    "cmc_eps,scal_eps,lemma_gap,notes";

struct SweepSpec {
  ShapeDescriptor base;
  std::string param;           // "delta", "resolution", or "radius"
  std::vector<double> values;  // at least two, strictly increasing
  AnalysisConfig config;
};

struct SweepRow {
  double value = 0.0;
  std::array<double, 11> columns{};  // order matches kSweepCsvHeader[1..11]
  std::string note;
  bool ok = false;
};

struct SweepResult {
  SweepSpec spec;
  std::vector<SweepRow> rows;
  int succeeded = 0;
};

inline void validate_sweep(const SweepSpec& spec) {
  if (spec.values.size() < 2) throw ValidationError("sweep needs at least two values");
  for (std::size_t i = 1; i < spec.values.size(); ++i)
    if (!(spec.values[i] > spec.values[i - 1]))
      throw ValidationError("sweep values must be strictly increasing");
  if (spec.param == "delta") {
    if (!std::holds_alternative<PerturbedSphere>(spec.base.shape))
      throw ValidationError("delta sweeps require a perturbed_sphere base shape");
  } else if (spec.param == "radius") {
    if (!std::holds_alternative<Sphere>(spec.base.shape) &&
        !std::holds_alternative<PerturbedSphere>(spec.base.shape))
      throw ValidationError("radius sweeps require a sphere-family base shape");
  } else if (spec.param == "resolution") {
    for (double v : spec.values)
      if (v < 1 || v != std::floor(v))
        throw ValidationError("resolution values must be positive integers");
  } else {
    throw ValidationError("unknown sweep parameter '" + spec.param +
                          "' (expected delta, radius, or resolution)");
  }
  validate_config(spec.config);
}

inline ShapeDescriptor apply_sweep_value(const SweepSpec& spec, double value) {
  ShapeDescriptor desc = spec.base;
  if (spec.param == "resolution") {
    desc.resolution = static_cast<int>(value);
  } else if (spec.param == "delta") {
    std::get<PerturbedSphere>(desc.shape).delta = value;
  } else if (spec.param == "radius") {
    if (auto* s = std::get_if<Sphere>(&desc.shape))
      s->radius = value;
    else
      std::get<PerturbedSphere>(desc.shape).radius = value;
  }
  return desc;
}

/// Runs the sweep sequentially; per-row failures become NaN rows with a note.
inline SweepResult run_sweep(const SweepSpec& spec,
                             std::size_t max_vertices = kDefaultMaxVertices) {
  validate_sweep(spec);
  SweepResult result;
  result.spec = spec;
  for (double value : spec.values) {
    SweepRow row;
    row.value = value;
    row.columns.fill(std::numeric_limits<double>::quiet_NaN());
    try {
      const ShapeDescriptor desc = apply_sweep_value(spec, value);
      const Mesh mesh = generate(desc.shape, desc.resolution, max_vertices);
      const PinchReport report =
          analyze(mesh, spec.config, shape_to_json(desc).dump());
      row.columns[0] = report.spectral.lambda1;
      row.columns[1] = report.functionals.k_pr;
      row.columns[2] = report.functionals.pinching.dimensionless;
      row.columns[3] = report.functionals.hm_residual[report.config.r - 1];
      row.columns[4] = report.einstein_dev;
      row.columns[5] = report.umbilic.tau_2q;
      row.columns[6] = report.umbilic.h2_dev_q;
      row.columns[7] = report.theta_hat ? *report.theta_hat
                                        : std::numeric_limits<double>::quiet_NaN();
      row.columns[8] = report.cmc.cmc_eps;
      row.columns[9] = report.cmc.scal_eps;
      row.columns[10] = report.cmc.lemma_gap;
      if (!report.theta_hat) row.note = "theta_hat undefined: " + report.theta_note;
      row.ok = true;
      ++result.succeeded;
    } catch (const std::exception& e) {
      row.note = e.what();
    }
    result.rows.push_back(std::move(row));
  }
  return result;
}

namespace detail {

inline std::string csv_number(double x) {
  if (std::isnan(x)) return "NaN";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", x);
  return buf;
}

inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

inline std::string svg_number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", x);
  return buf;
}

}  // namespace detail

inline std::string sweep_to_csv(const SweepResult& result) {
  std::string csv = kSweepCsvHeader;
  csv += '\n';
  for (const SweepRow& row : result.rows) {
    csv += detail::csv_number(row.value);
    for (double c : row.columns) {
      csv += ',';
      csv += detail::csv_number(c);
    }
    csv += ',';
    csv += detail::csv_escape(row.note);
    csv += '\n';
  }
  return csv;
}

/// Minimal deterministic line chart; one polyline per series, NaN points
/// skipped.
inline std::string svg_line_chart(const std::string& title, const std::string& x_label,
                                  const std::vector<std::string>& series_names,
                                  const std::vector<double>& xs,
                                  const std::vector<std::vector<double>>& series) {
  static constexpr const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};
  const double width = 720, height = 440;
  const double left = 70, right = 20, top = 40, bottom = 50;

  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (double x : xs) {
    xmin = std::min(xmin, x);
    xmax = std::max(xmax, x);
  }
  for (const auto& s : series)
    for (double y : s)
      if (!std::isnan(y)) {
        ymin = std::min(ymin, y);
        ymax = std::max(ymax, y);
      }
  if (!(xmax > xmin)) xmax = xmin + 1;
  if (!(ymax >= ymin)) {
    ymin = 0;
    ymax = 1;
  }
  if (ymax == ymin) {
    ymax += 0.5;
    ymin -= 0.5;
  }
  const double ypad = 0.05 * (ymax - ymin);
  ymin -= ypad;
  ymax += ypad;

  auto px = [&](double x) { return left + (x - xmin) / (xmax - xmin) * (width - left - right); };
  auto py = [&](double y) {
    return height - bottom - (y - ymin) / (ymax - ymin) * (height - top - bottom);
  };

  std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 720 440\">\n";
  svg += "<rect width=\"720\" height=\"440\" fill=\"white\"/>\n";
  svg += "<text x=\"360\" y=\"22\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"15\">" + title + "</text>\n";
  // axes
  svg += "<line x1=\"" + detail::svg_number(left) + "\" y1=\"" + detail::svg_number(top) +
         "\" x2=\"" + detail::svg_number(left) + "\" y2=\"" +
         detail::svg_number(height - bottom) + "\" stroke=\"black\"/>\n";
  svg += "<line x1=\"" + detail::svg_number(left) + "\" y1=\"" +
         detail::svg_number(height - bottom) + "\" x2=\"" + detail::svg_number(width - right) +
         "\" y2=\"" + detail::svg_number(height - bottom) + "\" stroke=\"black\"/>\n";
  for (int t = 0; t <= 4; ++t) {
    const double yv = ymin + (ymax - ymin) * t / 4;
    const double xv = xmin + (xmax - xmin) * t / 4;
    svg += "<text x=\"" + detail::svg_number(left - 6) + "\" y=\"" +
           detail::svg_number(py(yv) + 4) +
           "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" +
           detail::svg_number(yv) + "</text>\n";
    svg += "<text x=\"" + detail::svg_number(px(xv)) + "\" y=\"" +
           detail::svg_number(height - bottom + 18) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" +
           detail::svg_number(xv) + "</text>\n";
  }
  svg += "<text x=\"" + detail::svg_number((left + width - right) / 2) + "\" y=\"" +
         detail::svg_number(height - 12) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" + x_label +
         "</text>\n";

  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* color = kColors[s % 4];
    std::string points;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (std::isnan(series[s][i])) continue;
      points += detail::svg_number(px(xs[i])) + "," + detail::svg_number(py(series[s][i])) + " ";
    }
    svg += "<polyline fill=\"none\" stroke=\"" + std::string(color) +
           "\" stroke-width=\"1.5\" points=\"" + points + "\"/>\n";
    svg += "<text x=\"" + detail::svg_number(width - right - 8) + "\" y=\"" +
           detail::svg_number(top + 16 + 16 * static_cast<double>(s)) +
           "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\" fill=\"" + color +
           "\">" + series_names[s] + "</text>\n";
  }
  svg += "</svg>\n";
  return svg;
}

/// Chart files grouped by quantity kind, written next to `csv_path` with the
/// group name appended to its stem. Returns the written paths.
inline std::vector<std::filesystem::path> write_sweep_svgs(
    const SweepResult& result, const std::filesystem::path& csv_path) {
  std::vector<double> xs;
  for (const SweepRow& row : result.rows) xs.push_back(row.value);
  auto column = [&](int c) {
    std::vector<double> v;
    for (const SweepRow& row : result.rows) v.push_back(row.columns[c]);
    return v;
  };

  struct Group {
    const char* suffix;
    const char* title;
    std::vector<std::string> names;
    std::vector<int> cols;
  };
  const std::vector<Group> groups = {
      {"spectral", "spectrum and k constant", {"lambda1", "k_pr"}, {0, 1}},
      {"deficits", "inequality deficits", {"pinch_deficit", "hm_residual"}, {2, 3}},
      {"deviations", "deviation norms", {"einstein_dev", "tau_2q", "h2_dev"}, {4, 5, 6}},
      {"distortion", "quasi-isometry distortion", {"theta_hat"}, {7}},
      {"cmc", "mean/scalar curvature spread", {"cmc_eps", "scal_eps", "lemma_gap"}, {8, 9, 10}},
  };

  std::vector<std::filesystem::path> written;
  for (const Group& g : groups) {
    std::vector<std::vector<double>> series;
    for (int c : g.cols) series.push_back(column(c));
    std::filesystem::path path = csv_path;
    path.replace_filename(csv_path.stem().string() + "_" + g.suffix + ".svg");
    write_text_file(path, svg_line_chart(g.title, result.spec.param, g.names, xs, series));
    written.push_back(path);
  }
  return written;
}

}  // namespace pinchlab
