#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "dethunt/analysis.hpp"
#include "dethunt/gallery.hpp"
#include "dethunt/io.hpp"
#include "dethunt/process.hpp"
#include "dethunt/specdsl.hpp"

namespace dethunt::cli {

enum ExitCode : int { kOk = 0, kInvalidSpec = 1, kIoError = 2, kInternal = 3 };

struct Config {
  std::string command;
  std::optional<std::string> spec_path;
  std::vector<double> xs;
  std::vector<double> xis;
  double T = 4.0;
  int level = 10;
  double window = 8.0;
  double tol = 1e-8;
  std::string format = "json";
  std::optional<std::string> out;
};

namespace detail {

struct IoFailure {
  std::string message;
};

struct SpecFailure {
  Json report;
};

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoFailure{"cannot read '" + path + "'"};
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text)) throw IoFailure{"cannot write '" + path + "'"};
}

inline Structure load_structure(const Config& cfg) {
  if (!cfg.spec_path) throw IoFailure{"command '" + cfg.command + "' needs --spec"};
  const std::string text = read_file(*cfg.spec_path);
  const std::string dir = std::filesystem::path(*cfg.spec_path).parent_path().string();
  BuildResult br = load_spec(text, directory_resolver(dir));
  if (!br.ok()) {
    Json diags = Json::array();
    for (const ParseDiagnostic& d : br.diagnostics) diags.push_back(to_json(d));
    Json faults = Json::array();
    for (const ValidationFault& f : br.faults) faults.push_back(to_json(f));
    throw SpecFailure{Json{{"valid", false}, {"diagnostics", diags}, {"faults", faults}}};
  }
  return std::move(*br.structure);
}

inline void emit(const Config& cfg, std::ostream& out, const std::string& text) {
  if (cfg.out) write_file(*cfg.out, text);
  else out << text;
}

inline Json classify(const Structure& s, const Config& cfg) {
  Json reports = Json::array();
  reports.push_back(to_json(PropertyReport{"hunt", Verdict::holds, 0.0, {}, s.notes()}));

  const std::vector<double> xs = uniform_grid(-cfg.window, cfg.window, 17);
  PropertyReport semi{"semimartingale", Verdict::holds, 0.0, {}, {}};
  for (double x : xs) {
    const PathShape shape = check_path_shape(sample_path(s, x, cfg.T, cfg.level));
    const VariationResult v = total_variation(flow_of(s), x, cfg.T, std::max(0, cfg.level - 6), cfg.level);
    semi.residual = std::max(semi.residual, v.estimates.back());
    if (shape.report.fails() || v.diverges) {
      semi.verdict = Verdict::fails;
      semi.witnesses.push_back({{x, cfg.T}, v.estimates.back(), v.estimates.front(), shape.report.fails() ? "path shape" : "variation unsettled"});
    }
  }
  reports.push_back(to_json(semi));
  reports.push_back(to_json(is_cb_feller(s)));
  reports.push_back(to_json(is_feller(s)));
  reports.push_back(to_json(numeric_feller_check(s)));
  reports.push_back(to_json(is_rich(s)));
  reports.push_back(to_json(check_time_homogeneity(flow_of(s), make_homogeneity_probes(s, 1000), cfg.tol)));

  Json summary = Json::object();
  for (const Json& r : reports) summary[r["property"].get<std::string>()] = r["verdict"];
  return Json{{"structure", s.signature()}, {"summary", summary}, {"reports", reports}};
}

inline std::string symbol_csv(const Structure& s, const std::vector<double>& xs, const std::vector<double>& xis) {
  std::string out = "x,xi,re,im\n";
  for (double x : xs)
    for (double xi : xis) {
      std::string re = "nan", im = "nan";
      try {
        const SymbolValue p = symbol(s, x, xi);
        re = format_real17(p.real_part);
        im = format_real17(p.imag_part);
      } catch (const SymbolUndefined&) {
      }
      out += format_real17(x) + "," + format_real17(xi) + "," + re + "," + im + "\n";
    }
  return out;
}

inline int gallery(const Config& cfg, std::ostream& out) {
  const std::vector<GalleryEntry> entries = build_gallery();
  GalleryGrid grid;
  grid.T = cfg.T;
  grid.level = cfg.level;
  grid.window = cfg.window;
  const GalleryRun run = run_gallery(entries, grid);
  if (cfg.format == "json") {
    Json rows = Json::array();
    for (const GalleryRow& r : run.rows)
      rows.push_back(Json{{"entry", r.entry},
                          {"property", r.property},
                          {"expected", to_string(r.expected)},
                          {"observed", to_string(r.observed)},
                          {"match", r.match()}});
    emit(cfg, out, Json{{"manifest", gallery_manifest(entries)}, {"rows", rows}, {"all_match", run.all_match()}}.dump(2) + "\n");
  } else {
    std::string table;
    char line[160];
    std::snprintf(line, sizeof line, "%-16s %-20s %-13s %-13s %s\n", "entry", "property", "expected", "observed", "result");
    table += line;
    for (const GalleryEntry& e : entries) {
      for (const GalleryRow& r : run.rows) {
        if (r.entry != e.name) continue;
        std::snprintf(line, sizeof line, "%-16s %-20s %-13s %-13s %s\n", r.entry.c_str(), r.property.c_str(),
                      to_string(r.expected), to_string(r.observed), r.match() ? "PASS" : "FAIL");
        table += line;
      }
    }
    std::size_t passed = 0;
    for (const GalleryEntry& e : entries) passed += run.entry_matches(e.name) ? 1 : 0;
    table += std::to_string(passed) + "/" + std::to_string(entries.size()) + " entries PASS\n";
    emit(cfg, out, table);
  }
  return run.all_match() ? kOk : kInternal;
}

}  // namespace detail

/// Executes one command. Results go to `out` (or --out), diagnostics to `err`.
inline int run(const Config& cfg, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  try {
    if (!(cfg.tol > 0) || !(cfg.T > 0) || cfg.level < 2 || cfg.level > 20 || !(cfg.window > 0)) {
      err << "invalid grid options: need tol > 0, T > 0, 2 <= level <= 20, window > 0\n";
      return kInternal;
    }
    const std::string& c = cfg.command;
    if (c == "gallery") return detail::gallery(cfg, out);

    if (c == "validate") {
      const Structure s = detail::load_structure(cfg);
      Json j{{"valid", true}, {"structure", s.signature()}};
      if (!s.notes().empty()) j["notes"] = s.notes();
      detail::emit(cfg, out, j.dump(2) + "\n");
      return kOk;
    }
    if (c == "classify") {
      const Structure s = detail::load_structure(cfg);
      detail::emit(cfg, out, detail::classify(s, cfg).dump(2) + "\n");
      return kOk;
    }
    if (c == "eval") {
      const Structure s = detail::load_structure(cfg);
      std::vector<PathSample> samples;
      for (double x : cfg.xs.empty() ? std::vector<double>{0.0} : cfg.xs) samples.push_back(sample_path(s, x, cfg.T, cfg.level));
      if (cfg.format == "svg") detail::emit(cfg, out, path_sample_svg(samples));
      else if (cfg.format == "csv") detail::emit(cfg, out, path_sample_csv(samples));
      else {
        Json arr = Json::array();
        for (const PathSample& ps : samples) {
          Json values = Json::array();
          for (double v : ps.values) values.push_back(v);
          arr.push_back(Json{{"x", ps.start_x}, {"T", ps.T}, {"level", ps.level}, {"values", values}});
        }
        detail::emit(cfg, out, arr.dump(2) + "\n");
      }
      return kOk;
    }
    if (c == "symbol") {
      const Structure s = detail::load_structure(cfg);
      const std::vector<double> xs = cfg.xs.empty() ? uniform_grid(-4.0, 4.0, 9) : cfg.xs;
      const std::vector<double> xis = cfg.xis.empty() ? std::vector<double>{-2.0, -1.0, 1.0, 2.0} : cfg.xis;
      detail::emit(cfg, out, detail::symbol_csv(s, xs, xis));
      return kOk;
    }
    if (c == "export") {
      const Structure s = detail::load_structure(cfg);
      const EmittedSpec e = emit_spec(s);
      detail::emit(cfg, out, e.text);
      const std::filesystem::path dir = cfg.out ? std::filesystem::path(*cfg.out).parent_path() : std::filesystem::path();
      for (const auto& [name, text] : e.files) detail::write_file((dir / name).string(), text);
      return kOk;
    }
    err << "unknown command '" << c << "'\n";
    return kInternal;
  } catch (const detail::IoFailure& e) {
    err << e.message << "\n";
    return kIoError;
  } catch (const detail::SpecFailure& e) {
    err << e.report.dump(2) << "\n";
    return kInvalidSpec;
  } catch (const EmitError& e) {
    err << e.what() << "\n";
    return kInvalidSpec;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kInternal;
  }
}

}  // namespace dethunt::cli
