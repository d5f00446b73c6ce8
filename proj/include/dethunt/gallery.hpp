#pragma once

#include <chrono>
#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "dethunt/analysis.hpp"
#include "dethunt/infer.hpp"
#include "dethunt/process.hpp"
#include "dethunt/raw_families.hpp"
#include "dethunt/structure.hpp"

namespace dethunt {

struct GalleryEntry {
  std::string name;
  std::string locator;
  std::variant<Structure, RawFamily> build;
  std::vector<std::pair<std::string, Verdict>> expected;
  std::function<double(double)> expected_drift;  // closed-form drift where known

  bool is_structure() const { return std::holds_alternative<Structure>(build); }
  const Structure& structure() const { return std::get<Structure>(build); }
  const RawFamily& raw() const { return std::get<RawFamily>(build); }
};

namespace gallery {

inline Structure e1_2() {
  return make_structure({Domain::monotone(Interval::real_line(), GeneratingPath::builtin("cubic", Interval::real_line()))});
}

inline Structure cantor() {
  return make_structure({Domain::monotone(Interval::real_line(), GeneratingPath::cantor())});
}

/// Slope 1/2 below 0, slope 1 above.
inline Structure knick() {
  return make_structure({Domain::monotone(Interval::real_line(), GeneratingPath::polyline({{-1.0, -0.5}, {0.0, 0.0}, {1.0, 1.0}}))});
}

inline double knick_drift(double x) { return x < 0.0 ? 0.5 : 1.0; }

/// ⊖ below 0, rest at 0, ⊕ above: X_t^x = x + sign(x) t.
inline Structure space_drift() {
  const Interval I = Interval::open(0.0, kInf);
  return make_structure({
      Domain::monotone(Interval::open(-kInf, 0.0), GeneratingPath::linear(-1.0, 0.0, I)),
      Domain::constant(Interval::point(0.0)),
      Domain::monotone(Interval::open(0.0, kInf), GeneratingPath::linear(1.0, 0.0, I)),
  });
}

inline double sign_drift(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

/// x -> -x reflected path on (-inf, 0], Cantor path on (0, inf).
inline Structure partly_cantor() {
  return make_structure({
      Domain::monotone(Interval::open_closed(-kInf, 0.0), GeneratingPath::linear(-1.0, 0.0, Interval::closed_open(0.0, kInf))),
      Domain::monotone(Interval::open(0.0, kInf), GeneratingPath::cantor(kDefaultCantorDepth, Interval::open(0.0, kInf))),
  });
}

/// -1 - s^2 and 1 + s^2 on [0, inf) around a resting (-1, 1).
inline Structure mid_deriv_zero() {
  const Interval I = Interval::closed_open(0.0, kInf);
  return make_structure({
      Domain::monotone(Interval::open_closed(-kInf, -1.0), GeneratingPath::builtin("fall_sq", I)),
      Domain::constant(Interval::open(-1.0, 1.0)),
      Domain::monotone(Interval::closed_open(1.0, kInf), GeneratingPath::builtin("rise_sq", I)),
  });
}

}  // namespace gallery

inline std::vector<GalleryEntry> build_gallery() {
  using V = Verdict;
  std::vector<GalleryEntry> g;
  g.push_back({"e1_2", "single smooth generating path shifted left and right", gallery::e1_2(),
               {{"hunt", V::holds}, {"path_shape", V::holds}, {"variation_diverges", V::fails}, {"homogeneity", V::holds}},
               {}});
  g.push_back({"e2_9", "zig-zag path from 0 crossing (-1/2, 1/2) infinitely often before time 1", zigzag_family(),
               {{"hunt", V::fails}, {"path_shape", V::fails}, {"variation_diverges", V::holds}},
               {}});
  g.push_back({"cantor", "Cantor process, Feller but neither rich nor Itô", gallery::cantor(),
               {{"hunt", V::holds}, {"variation_diverges", V::fails}, {"feller", V::holds}, {"rich", V::fails},
                {"ito", V::fails}, {"ac_defect", V::holds}},
               {}});
  g.push_back({"knick", "kinked linear path, Feller and Itô but not rich", gallery::knick(),
               {{"feller", V::holds}, {"rich", V::fails}, {"ito", V::holds}},
               gallery::knick_drift});
  g.push_back({"space_drift", "drift sign(x) with rest at 0, Itô but not Feller", gallery::space_drift(),
               {{"feller", V::fails}, {"ito", V::holds}},
               gallery::sign_drift});
  g.push_back({"partly_cantor", "reflection below 0 and Cantor path above, a Hunt semimartingale outside Feller and Itô",
               gallery::partly_cantor(),
               {{"hunt", V::holds}, {"variation_diverges", V::fails}, {"feller", V::fails}, {"ito", V::fails}},
               {}});
  g.push_back({"mid_deriv_zero", "resting middle with zero boundary derivatives, Itô but not Feller", gallery::mid_deriv_zero(),
               {{"feller", V::fails}, {"smooth_transition", V::holds}, {"ito", V::holds}},
               {}});
  g.push_back({"cadlag_5_5", "cadlag path from -1 on the interleaved sets A and B", cadlag_family(),
               {{"hunt", V::fails}, {"variation_diverges", V::holds}},
               {}});
  return g;
}

// ---------------------------------------------------------------------------
// Property runners

struct GalleryGrid {
  double T = 4.0;
  int level = 10;
  double window = 8.0;
  std::size_t x_points = 257;
  int variation_min_level = 4;
  int variation_max_level = 14;
  std::size_t homogeneity_probes = 1000;
  double homogeneity_tol = 1e-8;
};

inline PropertyReport run_property(const GalleryEntry& e, const std::string& id, const GalleryGrid& g = {}) {
  const std::vector<double> xs = uniform_grid(-g.window, g.window, g.x_points);
  if (!e.is_structure()) {
    const RawFamily& f = e.raw();
    if (id == "hunt") {
      SampledFamily sf = sample_family(f, uniform_grid(-1.0, 1.0, 65), uniform_grid(0.0, 2.0, 257));
      PropertyReport r = infer_structure(sf, 1e-9).report;
      r.property_id = "hunt";
      return r;
    }
    if (id == "path_shape") return check_path_shape(sample_path(f, f.origin, 2.0, 8)).report;
    if (id == "variation_diverges") {
      const VariationResult v = total_variation(f, f.origin, 1.0, g.variation_min_level, g.variation_max_level);
      PropertyReport r{"variation_diverges", v.diverges ? Verdict::holds : Verdict::fails, v.estimates.back(), {}, {}};
      if (!v.diverges) r.witnesses.push_back({{f.origin, 1.0}, v.estimates.back(), v.estimates[v.estimates.size() - 2], "estimates settled"});
      return r;
    }
    throw DomainError("property '" + id + "' does not apply to raw family " + e.name);
  }

  const Structure& s = e.structure();
  if (id == "hunt") {
    ValidationResult v = validate_structure(s.domains());
    PropertyReport r{"hunt", v.ok() ? Verdict::holds : Verdict::fails, 0.0, {}, {}};
    for (const ValidationFault& f : v.faults) r.witnesses.push_back({{}, 0.0, 0.0, "[" + f.rule_id + "] " + f.message});
    return r;
  }
  if (id == "path_shape") {
    PropertyReport r{"path_shape", Verdict::holds, 0.0, {}, {}};
    for (double x : xs) {
      PathShape ps = check_path_shape(sample_path(s, x, g.T, g.level));
      if (ps.report.fails()) {
        r.verdict = Verdict::fails;
        Witness w = ps.report.witnesses.front();
        w.inputs.insert(w.inputs.begin(), x);
        r.witnesses.push_back(w);
      }
    }
    return r;
  }
  if (id == "variation_diverges") {
    PropertyReport r{"variation_diverges", Verdict::fails, 0.0, {}, {}};
    for (std::size_t i = 0; i < xs.size(); i += 16) {
      const VariationResult v = total_variation(flow_of(s), xs[i], g.T, g.variation_min_level, g.level);
      r.residual = std::max(r.residual, v.estimates.back());
      if (v.diverges) {
        r.verdict = Verdict::holds;
        r.notes.push_back("variation unsettled from x = " + format_real(xs[i]));
      }
    }
    if (r.fails()) r.witnesses.push_back({{xs.front(), xs.back()}, r.residual, kVariationCap, "variation settles from every sampled start"});
    return r;
  }
  if (id == "homogeneity")
    return check_time_homogeneity(flow_of(s), make_homogeneity_probes(s, g.homogeneity_probes), g.homogeneity_tol);
  if (id == "feller") return is_feller(s);
  if (id == "cb_feller") return is_cb_feller(s);
  if (id == "feller_numeric") return numeric_feller_check(s);
  if (id == "rich") return is_rich(s);
  if (id == "smooth_transition") return check_smooth_transitions(s);
  if (id == "ito") return check_ito_drift(s, {}, e.expected_drift);
  if (id == "ac_defect") {
    if (s.size() != 1 || !s[0].is_monotone()) throw DomainError("ac_defect needs a single monotone domain");
    const AcDefect d = ac_defect(*s[0].path, 20);
    const bool bounded_away = d.defect >= 0.4999 && d.defect <= 0.5005;
    PropertyReport r{"ac_defect", bounded_away ? Verdict::holds : Verdict::fails, d.defect, {}, {}};
    r.witnesses.push_back({{20.0}, d.defect, 0.5, "removed increment " + format_real(d.removed_increment_sum)});
    return r;
  }
  throw DomainError("unknown gallery property '" + id + "'");
}

struct GalleryRow {
  std::string entry;
  std::string property;
  Verdict expected;
  Verdict observed;
  PropertyReport report;

  bool match() const { return expected == observed; }
};

struct GalleryRun {
  std::vector<GalleryRow> rows;
  double seconds = 0.0;

  bool all_match() const {
    for (const GalleryRow& r : rows)
      if (!r.match()) return false;
    return true;
  }
  bool entry_matches(const std::string& name) const {
    for (const GalleryRow& r : rows)
      if (r.entry == name && !r.match()) return false;
    return true;
  }
};

inline GalleryRun run_gallery(const std::vector<GalleryEntry>& entries, const GalleryGrid& g = {}) {
  const auto start = std::chrono::steady_clock::now();
  GalleryRun run;
  for (const GalleryEntry& e : entries)
    for (const auto& [id, want] : e.expected) {
      PropertyReport r = run_property(e, id, g);
      run.rows.push_back({e.name, id, want, r.verdict, std::move(r)});
    }
  run.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return run;
}

}  // namespace dethunt
