#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <random>
#include <string>
#include <vector>

#include "dethunt/error.hpp"
#include "dethunt/format.hpp"
#include "dethunt/report.hpp"
#include "dethunt/structure.hpp"

namespace dethunt {

/// Anything that maps (start x, time t) to a state: structures via
/// `flow_of`, raw families from the gallery, sampled data.
template <class F>
concept ProcessFamily = requires(const F& f, double x, double t) {
  { f(x, t) } -> std::convertible_to<double>;
};

/// X_t^x for a validated structure, with absorption into an adjacent ⊙ domain
/// once the generating path runs out of parameter.
inline double evaluate(const Structure& s, double x, double t) {
  if (!(t >= 0.0) || std::isinf(t)) throw DomainError("evaluate: t must be finite and nonnegative, got " + format_real(t));
  if (!std::isfinite(x)) throw DomainError("evaluate: x must be finite, got " + format_real(x));
  const std::size_t j = locate_domain(s, x).index;
  const Domain& d = s[j];
  if (!d.is_monotone()) return x;
  const GeneratingPath& p = *d.path;
  const double sigma = detail::inverse_unchecked(p, x);
  if (t == 0.0) return x;
  const double tau = t + sigma;
  if (p.domain().contains(tau)) return p.value(tau);

  if (d.kind == Kind::plus) {
    if (j + 1 < s.size() && s[j + 1].kind == Kind::constant && s[j + 1].J.lo_closed) return s[j + 1].J.lo;
  } else {
    if (j > 0 && s[j - 1].kind == Kind::constant && s[j - 1].J.hi_closed) return s[j - 1].J.hi;
  }
  throw StructuralIntegrityError("evaluate: path of domain " + std::to_string(j) + " leaves I = " +
                                 p.domain().str() + " with no absorbing ⊙ neighbor");
}

/// The structure as a ProcessFamily.
inline auto flow_of(const Structure& s) {
  return [&s](double x, double t) { return evaluate(s, x, t); };
}

/// A trajectory on the uniform dyadic grid of 2^level + 1 points on [0, T].
struct PathSample {
  double start_x = 0.0;
  double T = 1.0;
  int level = 0;
  std::vector<double> times;
  std::vector<double> values;
};

inline double dyadic_time(double T, int level, std::size_t i) {
  return T * std::ldexp(static_cast<double>(i), -level);
}

template <ProcessFamily F>
PathSample sample_path(const F& f, double x, double T, int level) {
  if (!(T > 0) || !std::isfinite(T)) throw DomainError("sample_path: T must be positive");
  if (level < 0 || level > 30) throw DomainError("sample_path: level must be in [0, 30]");
  PathSample ps{x, T, level, {}, {}};
  const std::size_t n = (std::size_t{1} << level) + 1;
  ps.times.resize(n);
  ps.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    ps.times[i] = dyadic_time(T, level, i);
    ps.values[i] = i == 0 ? x : static_cast<double>(f(x, ps.times[i]));
  }
  return ps;
}

inline PathSample sample_path(const Structure& s, double x, double T, int level) {
  return sample_path(flow_of(s), x, T, level);
}

/// One level finer; existing samples are copied, only midpoints are evaluated.
template <ProcessFamily F>
PathSample refine(const PathSample& ps, const F& f) {
  PathSample out{ps.start_x, ps.T, ps.level + 1, {}, {}};
  const std::size_t n = (std::size_t{1} << out.level) + 1;
  out.times.resize(n);
  out.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.times[i] = dyadic_time(ps.T, out.level, i);
    out.values[i] = i % 2 == 0 ? ps.values[i / 2] : static_cast<double>(f(ps.start_x, out.times[i]));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Time homogeneity

/// Two starts whose trajectories meet: X_s^x = X_t^y. The check compares the
/// trajectories after a further time h for every h in `hs`.
struct HomogeneityProbe {
  double x = 0.0;
  double y = 0.0;
  double s = 0.0;
  double t = 0.0;
  std::vector<double> hs;
};

template <ProcessFamily F>
PropertyReport check_time_homogeneity(const F& f, const std::vector<HomogeneityProbe>& probes, double tol) {
  PropertyReport r{"homogeneity", Verdict::holds, 0.0, {}, {}};
  std::size_t rejected = 0;
  for (const HomogeneityProbe& p : probes) {
    const double a = f(p.x, p.s);
    const double b = f(p.y, p.t);
    if (std::abs(a - b) > tol * (1.0 + std::abs(a))) {
      ++rejected;
      continue;
    }
    for (double h : p.hs) {
      const double u = f(p.x, p.s + h);
      const double v = f(p.y, p.t + h);
      const double gap = std::abs(u - v);
      r.residual = std::max(r.residual, gap / (1.0 + std::abs(u)));
      if (gap > tol * (1.0 + std::abs(u))) r.witnesses.push_back({{p.x, p.y, p.s, p.t, h}, u, v, ""});
    }
  }
  if (!r.witnesses.empty()) r.verdict = Verdict::fails;
  else if (rejected > 0) {
    r.verdict = Verdict::inconclusive;
    r.notes.push_back(std::to_string(rejected) + " probes rejected: trajectories did not meet within tol");
  }
  sort_witnesses(r);
  return r;
}

/// Random meeting probes built from z = Φ(Φ⁻¹(x) + t): the start
/// x = Φ(Φ⁻¹(z) − t) reaches z after time t, and z itself is the partner
/// start at time 0. Points of ⊙ domains give trivial probes x = y = z.
inline std::vector<HomogeneityProbe> make_homogeneity_probes(const Structure& st, std::size_t count,
                                                             unsigned seed = 20240611u, double window = 8.0,
                                                             std::vector<double> hs = {0.1, 0.5, 1.0, 2.0}) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> zdist(-window, window);
  std::uniform_real_distribution<double> tdist(0.0, 2.0);
  std::vector<HomogeneityProbe> probes;
  probes.reserve(count);
  while (probes.size() < count) {
    const double z = zdist(rng);
    const double t = tdist(rng);
    const Domain& d = st[locate_domain(st, z).index];
    if (!d.is_monotone()) {
      probes.push_back({z, z, t, 0.0, hs});
      continue;
    }
    const GeneratingPath& p = *d.path;
    const double s0 = detail::inverse_unchecked(p, z) - t;
    if (!p.domain().contains(s0)) continue;
    const double x = p.value(s0);
    if (!d.J.contains(x)) continue;
    probes.push_back({x, z, t, 0.0, hs});
  }
  return probes;
}

// ---------------------------------------------------------------------------
// Path shape

struct PathShape {
  PropertyReport report;
  double t0 = 0.0;   // start of the constant tail; +inf if none inside the window
  int direction = 0;  // +1 increasing, -1 decreasing, 0 constant
};

/// Monotone-then-constant: a strictly monotone prefix followed by a constant
/// tail. Otherwise the report names a triple t_a < t_b < t_c whose values
/// break the pattern.
inline PathShape check_path_shape(const PathSample& ps, double tol = 1e-12) {
  PathShape out;
  out.report.property_id = "path_shape";
  out.report.verdict = Verdict::holds;
  const auto& t = ps.times;
  const auto& v = ps.values;
  const std::size_t n = v.size();
  if (n < 2) {
    out.report.verdict = Verdict::inconclusive;
    out.report.notes.push_back("sample has fewer than two points");
    return out;
  }
  auto same = [&](double a, double b) { return std::abs(a - b) <= tol * (1.0 + std::abs(b)); };

  std::size_t tail = n - 1;  // first index of the constant tail
  while (tail > 0 && same(v[tail - 1], v[n - 1])) --tail;

  int dir = 0;
  for (std::size_t i = 0; i < tail; ++i) {
    const double d = v[i + 1] - v[i];
    const int sgn = same(v[i + 1], v[i]) ? 0 : (d > 0 ? 1 : -1);
    if (sgn == 0) {
      // Stalled before the tail, then moved again.
      std::size_t k = i + 1;
      while (k < n && same(v[k], v[i])) ++k;
      out.report.witnesses.push_back({{t[i], t[i + 1], t[std::min(k, n - 1)]}, v[std::min(k, n - 1)], v[i],
                                      "constant stretch followed by motion"});
      break;
    }
    if (dir == 0) dir = sgn;
    else if (sgn != dir) {
      out.report.witnesses.push_back({{t[i - 1], t[i], t[i + 1]}, v[i + 1], v[i],
                                      dir > 0 ? "increase followed by decrease" : "decrease followed by increase"});
      break;
    }
  }
  if (!out.report.witnesses.empty()) {
    out.report.verdict = Verdict::fails;
    out.report.residual = std::abs(out.report.witnesses.front().observed - out.report.witnesses.front().expected);
    return out;
  }
  out.direction = dir;
  out.t0 = tail == n - 1 && dir != 0 ? kInf : t[tail];
  return out;
}

// ---------------------------------------------------------------------------
// Total variation

inline constexpr double kVariationCap = 1e6;
inline constexpr double kVariationRelIncrement = 1e-3;

struct VariationResult {
  std::vector<int> levels;
  std::vector<double> estimates;
  bool diverges = false;
};

inline double sample_variation(const std::vector<double>& values) {
  long double sum = 0.0L;
  for (std::size_t i = 1; i < values.size(); ++i) sum += std::abs(static_cast<long double>(values[i]) - values[i - 1]);
  return static_cast<double>(sum);
}

/// Dyadic variation of t -> f(x, t) on [0, T] for each level in
/// [min_level, max_level]. The divergence flag is raised when the last
/// estimate exceeds `cap` or has not settled: relative increment between the
/// last two levels above 1e-3.
template <ProcessFamily F>
VariationResult total_variation(const F& f, double x, double T, int min_level, int max_level,
                                double cap = kVariationCap) {
  if (min_level < 0 || max_level < min_level || max_level > 26)
    throw DomainError("total_variation: need 0 <= min_level <= max_level <= 26");
  VariationResult out;
  PathSample ps = sample_path(f, x, T, min_level);
  for (int level = min_level;; ++level) {
    out.levels.push_back(level);
    out.estimates.push_back(sample_variation(ps.values));
    if (level == max_level) break;
    ps = refine(ps, f);
  }
  const double last = out.estimates.back();
  out.diverges = last > cap;
  if (out.estimates.size() >= 2) {
    const double prev = out.estimates[out.estimates.size() - 2];
    const double inc = (last - prev) / std::max(prev, 1e-300);
    if (prev == 0.0 ? last > 0.0 : inc > kVariationRelIncrement) out.diverges = true;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Continuity at grid resolution

struct ContinuityStats {
  double gaps[3] = {0, 0, 0};  // max adjacent gap at the finest level - 2, - 1, finest
  double scale = 0.0;
  std::size_t worst = 0;  // index of the worst finest-level gap
};

/// `values` are samples at the finest dyadic level; coarser levels are the
/// even (resp. multiple-of-four) subsequences.
inline ContinuityStats continuity_stats(const std::vector<double>& values) {
  if (values.size() < 5 || (values.size() - 1) % 4 != 0)
    throw DomainError("check_continuity: need 4k+1 samples spanning three dyadic levels");
  ContinuityStats st;
  for (double v : values) st.scale = std::max(st.scale, std::abs(v));
  for (int k = 0; k < 3; ++k) {
    const std::size_t stride = std::size_t{1} << (2 - k);
    for (std::size_t i = 0; i + stride < values.size(); i += stride) {
      const double g = std::abs(values[i + stride] - values[i]);
      if (g > st.gaps[k]) {
        st.gaps[k] = g;
        if (k == 2) st.worst = i;
      }
    }
  }
  return st;
}

inline constexpr double kContinuityShrink = 1.5;

/// Continuity of sampled values over the grid xs (finest level). Holds iff
/// the max gap shrinks by at least 1.5 from the finest level - 2 to the
/// finest level and ends below tol * (1 + scale). Gaps at rounding level
/// count as continuous.
inline PropertyReport check_continuity(const std::vector<double>& xs, const std::vector<double>& values,
                                       double tol, std::string id = "continuity") {
  if (xs.size() != values.size()) throw DomainError("check_continuity: grid and values differ in length");
  const ContinuityStats st = continuity_stats(values);
  PropertyReport r{std::move(id), Verdict::holds, st.gaps[2], {}, {}};
  const double floor = 1e-12 * (1.0 + st.scale);
  if (st.gaps[2] <= floor) return r;
  const double shrink = st.gaps[0] / st.gaps[2];
  const double bound = tol * (1.0 + st.scale);
  if (shrink < kContinuityShrink || st.gaps[2] > bound) {
    r.verdict = Verdict::fails;
    r.witnesses.push_back({{xs[st.worst], xs[st.worst + 1]}, st.gaps[2], shrink < kContinuityShrink ? st.gaps[0] / kContinuityShrink : bound,
                           "max gap " + format_real(st.gaps[2]) + ", shrink " + format_real(shrink)});
  }
  return r;
}

inline PropertyReport check_continuity(const PathSample& ps, double tol) {
  return check_continuity(ps.times, ps.values, tol, "path_continuity");
}

}  // namespace dethunt
