#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <json.hpp>

#include "dethunt/format.hpp"
#include "dethunt/gallery.hpp"
#include "dethunt/process.hpp"
#include "dethunt/report.hpp"
#include "dethunt/specdsl.hpp"
#include "dethunt/structure.hpp"

namespace dethunt {

using Json = nlohmann::ordered_json;

/// Finite numbers as JSON numbers, infinities and NaN as "inf"/"-inf"/"nan".
inline Json json_real(double v) {
  if (std::isfinite(v)) return v;
  return format_real(v);
}

inline Json to_json(const Witness& w) {
  Json inputs = Json::array();
  for (double v : w.inputs) inputs.push_back(json_real(v));
  Json j{{"inputs", inputs}, {"observed", json_real(w.observed)}, {"expected", json_real(w.expected)}};
  if (!w.note.empty()) j["note"] = w.note;
  return j;
}

inline Json to_json(const PropertyReport& r) {
  Json w = Json::array();
  for (const Witness& x : r.witnesses) w.push_back(to_json(x));
  Json j{{"property", r.property_id}, {"verdict", to_string(r.verdict)}, {"residual", json_real(r.residual)}, {"witnesses", w}};
  if (!r.notes.empty()) j["notes"] = r.notes;
  return j;
}

inline Json to_json(const ValidationFault& f) {
  return Json{{"rule_id", f.rule_id}, {"domains", f.domains}, {"message", f.message}};
}

inline Json to_json(const ParseDiagnostic& d) {
  return Json{{"line", d.line},
              {"column", d.column},
              {"severity", d.severity == Severity::error ? "error" : "warning"},
              {"message", d.message}};
}

inline Json gallery_manifest(const std::vector<GalleryEntry>& entries) {
  Json out = Json::array();
  for (const GalleryEntry& e : entries) {
    Json expected = Json::object();
    for (const auto& [id, v] : e.expected) expected[id] = to_string(v);
    out.push_back(Json{{"name", e.name},
                       {"locator", e.locator},
                       {"kind", e.is_structure() ? "structure" : "raw_family"},
                       {"expected", expected}});
  }
  return out;
}

// ---------------------------------------------------------------------------
// CSV and SVG

inline std::string path_sample_csv(const std::vector<PathSample>& samples) {
  std::string out = "x,t,value\n";
  for (const PathSample& ps : samples)
    for (std::size_t i = 0; i < ps.times.size(); ++i)
      out += format_real17(ps.start_x) + "," + format_real17(ps.times[i]) + "," + format_real17(ps.values[i]) + "\n";
  return out;
}

/// Static polyline plot of one or more trajectories over a fixed viewBox
/// derived from the data extents.
inline std::string path_sample_svg(const std::vector<PathSample>& samples) {
  double t_max = 0.0, v_min = kInf, v_max = -kInf;
  for (const PathSample& ps : samples) {
    if (!ps.times.empty()) t_max = std::max(t_max, ps.times.back());
    for (double v : ps.values) {
      v_min = std::min(v_min, v);
      v_max = std::max(v_max, v);
    }
  }
  if (!(v_max > v_min)) {
    v_min -= 1.0;
    v_max += 1.0;
  }
  if (!(t_max > 0)) t_max = 1.0;
  constexpr double W = 800.0, H = 500.0, M = 40.0;
  auto px = [&](double t) { return M + (W - 2 * M) * t / t_max; };
  auto py = [&](double v) { return H - M - (H - 2 * M) * (v - v_min) / (v_max - v_min); };
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
  std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 800 500\" width=\"800\" height=\"500\">\n";
  out += "<rect x=\"0\" y=\"0\" width=\"800\" height=\"500\" fill=\"white\"/>\n";
  out += "<line x1=\"40\" y1=\"460\" x2=\"760\" y2=\"460\" stroke=\"black\"/>\n";
  out += "<line x1=\"40\" y1=\"40\" x2=\"40\" y2=\"460\" stroke=\"black\"/>\n";
  out += "<text x=\"40\" y=\"480\" font-size=\"12\">0</text>\n";
  out += "<text x=\"740\" y=\"480\" font-size=\"12\">" + format_real(t_max) + "</text>\n";
  out += "<text x=\"2\" y=\"464\" font-size=\"12\">" + format_real(v_min) + "</text>\n";
  out += "<text x=\"2\" y=\"44\" font-size=\"12\">" + format_real(v_max) + "</text>\n";
  for (std::size_t k = 0; k < samples.size(); ++k) {
    const PathSample& ps = samples[k];
    out += "<polyline fill=\"none\" stroke=\"" + std::string(colors[k % 6]) + "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < ps.times.size(); ++i) {
      if (i) out += " ";
      out += format_real(std::round(px(ps.times[i]) * 100) / 100) + "," + format_real(std::round(py(ps.values[i]) * 100) / 100);
    }
    out += "\"/>\n";
  }
  out += "</svg>\n";
  return out;
}

}  // namespace dethunt
