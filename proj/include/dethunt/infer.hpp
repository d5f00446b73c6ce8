#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

#include "dethunt/process.hpp"
#include "dethunt/report.hpp"
#include "dethunt/structure.hpp"

namespace dethunt {

/// values[i][k] = f(xs[i], ts[k]); xs strictly increasing, ts strictly
/// increasing with ts[0] = 0.
struct SampledFamily {
  std::vector<double> xs;
  std::vector<double> ts;
  std::vector<std::vector<double>> values;
};

template <ProcessFamily F>
SampledFamily sample_family(const F& f, std::vector<double> xs, std::vector<double> ts) {
  SampledFamily out{std::move(xs), std::move(ts), {}};
  out.values.reserve(out.xs.size());
  for (double x : out.xs) {
    std::vector<double> row(out.ts.size());
    for (std::size_t k = 0; k < out.ts.size(); ++k) row[k] = f(x, out.ts[k]);
    out.values.push_back(std::move(row));
  }
  return out;
}

inline std::vector<double> uniform_grid(double a, double b, std::size_t points) {
  std::vector<double> g(points);
  for (std::size_t i = 0; i < points; ++i)
    g[i] = points == 1 ? a : a + (b - a) * static_cast<double>(i) / static_cast<double>(points - 1);
  return g;
}

struct InferenceResult {
  std::optional<Structure> structure;
  PropertyReport report;
  bool levy = false;
  double levy_slope = 0.0;
};

namespace detail {

struct Run {
  Kind kind;
  std::size_t first;
  std::size_t last;
};

// Nodes (s, value) of a generating path assembled from several sampled
// trajectories. Starting at the extreme grid point of the run, each
// trajectory contributes its strictly monotone stretch; the next trajectory
// starts at the farthest grid point already reached.
inline std::vector<Node> chain_nodes(const SampledFamily& fam, const Run& run, double tol) {
  const bool up = run.kind == Kind::plus;
  const std::size_t n = fam.xs.size();
  auto moved = [&](double a, double b) { return up ? b > a + tol * (1.0 + std::abs(a)) : b < a - tol * (1.0 + std::abs(a)); };
  std::vector<Node> nodes;
  std::size_t i = up ? run.first : run.last;
  double s_offset = 0.0;
  for (std::size_t guard = 0; guard < n; ++guard) {
    const auto& row = fam.values[i];
    for (std::size_t k = 0; k < fam.ts.size(); ++k) {
      const double s = s_offset + fam.ts[k];
      if (!nodes.empty() && (s <= nodes.back().s || !moved(nodes.back().v, row[k]))) {
        if (s <= nodes.back().s) continue;
        break;
      }
      nodes.push_back({s, row[k]});
    }
    // Farthest grid point of the run already covered by the nodes.
    const double reached = nodes.back().v;
    std::size_t next = i;
    if (up) {
      while (next + 1 <= run.last && fam.xs[next + 1] <= reached) ++next;
    } else {
      while (next >= run.first + 1 && fam.xs[next - 1] >= reached) --next;
    }
    if (next == i) break;
    i = next;
    // Parameter of xs[i] on the polyline through the nodes so far.
    const double x = fam.xs[i];
    std::size_t k = 1;
    while (k + 1 < nodes.size() && (up ? nodes[k].v < x : nodes[k].v > x)) ++k;
    const Node& a = nodes[k - 1];
    const Node& b = nodes[k];
    s_offset = a.s + (b.s - a.s) * (x - a.v) / (b.v - a.v);
  }
  return nodes;
}

}  // namespace detail

/// Candidate structure for a sampled family. Initial motion at the first
/// positive grid time classifies each start; maximal runs become domains;
/// monotone runs get tabulated paths chained from the sampled trajectories
/// and extended linearly beyond the sampled window.
inline InferenceResult infer_structure(const SampledFamily& fam, double tol) {
  InferenceResult out;
  PropertyReport& rep = out.report;
  rep.property_id = "inferred_structure";
  const std::size_t nx = fam.xs.size();
  const std::size_t nt = fam.ts.size();
  if (nx < 2 || nt < 2 || fam.ts[0] != 0.0 || fam.values.size() != nx)
    throw DomainError("infer_structure: need at least two starts, two times and ts[0] = 0");

  // Every trajectory must be monotone-then-constant.
  for (std::size_t i = 0; i < nx; ++i) {
    PathSample ps{fam.xs[i], fam.ts.back(), 0, fam.ts, fam.values[i]};
    PathShape shape = check_path_shape(ps, tol);
    if (shape.report.fails()) {
      rep.verdict = Verdict::fails;
      Witness w = shape.report.witnesses.front();
      w.inputs.insert(w.inputs.begin(), fam.xs[i]);
      w.note = "not a Hunt structure: " + w.note;
      rep.witnesses.push_back(w);
      return out;
    }
  }

  double max_dt = 0.0;
  for (std::size_t k = 1; k < nt; ++k) max_dt = std::max(max_dt, fam.ts[k] - fam.ts[k - 1]);
  const double fit_tol = std::max(tol, 2.0 * max_dt);

  // Linear Lévy case: f(x, t) = x + a t.
  const double a = (fam.values[0][1] - fam.xs[0]) / fam.ts[1];
  bool levy = true;
  for (std::size_t i = 0; i < nx && levy; ++i)
    for (std::size_t k = 0; k < nt && levy; ++k) {
      const double expect = fam.xs[i] + a * fam.ts[k];
      levy = std::abs(fam.values[i][k] - expect) <= tol * (1.0 + std::abs(expect));
    }

  std::vector<Domain> domains;
  if (levy) {
    out.levy = true;
    out.levy_slope = a;
    if (std::abs(a) * fam.ts[1] <= tol) domains.push_back(Domain::constant(Interval::real_line()));
    else domains.push_back(Domain::monotone(Interval::real_line(), GeneratingPath::linear(a, 0.0)));
  } else {
    std::vector<detail::Run> runs;
    for (std::size_t i = 0; i < nx; ++i) {
      const double x = fam.xs[i];
      const double m = fam.values[i][1] - x;
      const Kind k = std::abs(m) <= tol * (1.0 + std::abs(x)) ? Kind::constant : (m > 0 ? Kind::plus : Kind::minus);
      if (!runs.empty() && runs.back().kind == k) runs.back().last = i;
      else runs.push_back({k, i, i});
    }
    // Boundaries between runs: a ⊙ run owns its extreme grid points; two
    // monotone runs are separated by a singleton ⊙ at the midpoint.
    struct Piece {
      Kind kind;
      Interval J;
      const detail::Run* run;
    };
    std::vector<Piece> pieces;
    Interval cur{-kInf, kInf, false, false};
    for (std::size_t r = 0; r < runs.size(); ++r) {
      const detail::Run& run = runs[r];
      if (r + 1 == runs.size()) {
        cur.hi = kInf;
        cur.hi_closed = false;
        pieces.push_back({run.kind, cur, &run});
        break;
      }
      const detail::Run& next = runs[r + 1];
      const double x_hi = fam.xs[run.last];
      const double x_lo = fam.xs[next.first];
      if (run.kind == Kind::constant) {
        cur.hi = x_hi;
        cur.hi_closed = true;
        pieces.push_back({run.kind, cur, &run});
        cur = {x_hi, kInf, false, false};
      } else if (next.kind == Kind::constant) {
        cur.hi = x_lo;
        cur.hi_closed = false;
        pieces.push_back({run.kind, cur, &run});
        cur = {x_lo, kInf, true, false};
      } else {
        const double mid = x_hi + 0.5 * (x_lo - x_hi);
        cur.hi = mid;
        cur.hi_closed = false;
        pieces.push_back({run.kind, cur, &run});
        pieces.push_back({Kind::constant, Interval::point(mid), nullptr});
        cur = {mid, kInf, false, false};
      }
    }
    for (const Piece& p : pieces) {
      if (p.kind == Kind::constant) {
        domains.push_back(Domain::constant(p.J));
        continue;
      }
      std::vector<Node> nodes = detail::chain_nodes(fam, *p.run, tol);
      if (nodes.size() < 2) {
        rep.verdict = Verdict::inconclusive;
        rep.notes.push_back("run starting at x = " + format_real(fam.xs[p.run->first]) + " has too few moving samples");
        return out;
      }
      GeneratingPath base = GeneratingPath::table(nodes);
      // Parameter interval that maps onto J.
      Interval I;
      const bool up = p.kind == Kind::plus;
      const double lower_end = up ? p.J.lo : p.J.hi;
      const double upper_end = up ? p.J.hi : p.J.lo;
      if (std::isfinite(lower_end)) {
        I.lo = detail::bisect_inverse(base, lower_end);
        I.lo_closed = up ? p.J.lo_closed : p.J.hi_closed;
      }
      if (std::isfinite(upper_end)) I.hi = detail::bisect_inverse(base, upper_end);
      GeneratingPath path = base.with_domain(I);
      Interval J = p.J;
      // The fitted endpoint values are the range; J keeps the partition points.
      domains.push_back(Domain::monotone(J, path));
    }
  }

  ValidationResult vr = validate_structure(std::move(domains));
  if (!vr.ok()) {
    rep.verdict = Verdict::inconclusive;
    for (const ValidationFault& f : vr.faults) rep.notes.push_back("[" + f.rule_id + "] " + f.message);
    return out;
  }
  out.structure = std::move(vr.structure);

  for (std::size_t i = 0; i < nx; ++i)
    for (std::size_t k = 0; k < nt; ++k) {
      const double e = evaluate(*out.structure, fam.xs[i], fam.ts[k]);
      const double gap = std::abs(fam.values[i][k] - e);
      if (gap > rep.residual) rep.residual = gap;
      if (gap > fit_tol * (1.0 + std::abs(e)))
        rep.witnesses.push_back({{fam.xs[i], fam.ts[k]}, e, fam.values[i][k], "fitted structure deviates"});
    }
  rep.verdict = rep.witnesses.empty() ? Verdict::holds : Verdict::fails;
  if (rep.witnesses.size() > 16) rep.witnesses.resize(16);
  rep.notes.push_back("structure " + out.structure->signature() + (out.levy ? ", linear Lévy family" : ""));
  return out;
}

}  // namespace dethunt
