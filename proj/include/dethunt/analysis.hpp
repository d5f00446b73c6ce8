#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "dethunt/cantor.hpp"
#include "dethunt/error.hpp"
#include "dethunt/process.hpp"
#include "dethunt/report.hpp"
#include "dethunt/structure.hpp"
#include "dethunt/test_functions.hpp"

namespace dethunt {

class GeneratorUndefined : public HuntError {
 public:
  GeneratorUndefined(const std::string& what, DerivativeEstimate est) : HuntError(what), estimate(est) {}
  DerivativeEstimate estimate;
};

class SymbolUndefined : public HuntError {
 public:
  SymbolUndefined(const std::string& what, DerivativeEstimate est) : HuntError(what), estimate(est) {}
  DerivativeEstimate estimate;
};

/// T_t u(x) = u(X_t^x).
inline double semigroup_apply(const Structure& s, const TestFunction& u, double t, double x) {
  return u(evaluate(s, x, t));
}

// ---------------------------------------------------------------------------
// Structural classification

namespace detail {

inline std::string pair_label(const Structure& s, std::size_t j) {
  return std::string(glyph(s[j].kind)) + "|" + glyph(s[j + 1].kind) + " at " + format_real(s[j].J.hi);
}

inline double path_lo(const Domain& d) { return d.path->domain().lo; }

}  // namespace detail

inline PropertyReport is_cb_feller(const Structure& s) {
  PropertyReport r{"cb_feller", Verdict::holds, 0.0, {}, {}};
  for (std::size_t j = 0; j + 1 < s.size(); ++j) {
    const Domain& a = s[j];
    const Domain& b = s[j + 1];
    bool ok = false;
    std::string why;
    if (a.kind == Kind::constant && b.kind == Kind::constant) ok = true;
    else if (a.kind == Kind::plus && b.kind == Kind::constant) ok = true;
    else if (a.kind == Kind::constant && b.kind == Kind::minus) ok = true;
    else if (a.kind == Kind::constant && b.kind == Kind::plus) {
      ok = detail::path_lo(b) == -kInf;
      why = "upper ⊕ path starts at s = " + format_real(detail::path_lo(b));
    } else if (a.kind == Kind::minus && b.kind == Kind::constant) {
      ok = detail::path_lo(a) == -kInf;
      why = "lower ⊖ path starts at s = " + format_real(detail::path_lo(a));
    } else {
      why = "pair is not a continuity building block";
    }
    if (!ok) {
      r.verdict = Verdict::fails;
      r.witnesses.push_back({{static_cast<double>(j), static_cast<double>(j + 1), a.J.hi}, 0.0, 0.0,
                             detail::pair_label(s, j) + ": " + why});
      break;
    }
  }
  return r;
}

inline PropertyReport is_feller(const Structure& s) {
  PropertyReport r = is_cb_feller(s);
  r.property_id = "feller";
  if (r.fails()) return r;
  const Domain& low = s[0];
  const Domain& high = s[s.size() - 1];
  if (low.kind == Kind::plus && detail::path_lo(low) != -kInf) {
    r.verdict = Verdict::fails;
    r.witnesses.push_back({{0.0}, detail::path_lo(low), -kInf, "lowest ⊕ path starts at a finite parameter"});
  }
  if (high.kind == Kind::minus && detail::path_lo(high) != -kInf) {
    r.verdict = Verdict::fails;
    r.witnesses.push_back({{static_cast<double>(s.size() - 1)}, detail::path_lo(high), -kInf,
                           "highest ⊖ path starts at a finite parameter"});
  }
  return r;
}

// ---------------------------------------------------------------------------
// Numerical Feller check

struct FellerCheckOptions {
  std::vector<double> times{0.5, 1.0};
  double radius = 8.0;
  int level = 12;  // grid of 2^level + 1 points on [-radius, radius]
  double continuity_tol = 0.1;
  double decay_tol = 1e-6;
  int f2_min_k = 1;
  int f2_max_k = 20;
  int f2_level = 6;
  double f2_tol = 1e-2;
};

inline std::vector<double> dyadic_window(double radius, int level) {
  const std::size_t n = (std::size_t{1} << level) + 1;
  std::vector<double> xs(n);
  for (std::size_t i = 0; i < n; ++i) xs[i] = -radius + 2.0 * radius * std::ldexp(static_cast<double>(i), -level);
  return xs;
}

/// Continuity of x -> T_t u(x), decay of T_t u at far-field probes and
/// pointwise convergence T_t u(x) -> u(x) as t = 2^-k decreases.
inline PropertyReport numeric_feller_check(const Structure& s, const FellerCheckOptions& opt = {},
                                           const std::vector<TestFunction>& catalog = test_function_catalog()) {
  const std::vector<double> xs = dyadic_window(opt.radius, opt.level);

  PropertyReport cont{"feller_continuity", Verdict::holds, 0.0, {}, {}};
  PropertyReport decay{"feller_decay", Verdict::holds, 0.0, {}, {}};
  PropertyReport f2{"feller_f2", Verdict::holds, 0.0, {}, {}};

  std::vector<double> moved(xs.size());
  std::vector<double> tu(xs.size());
  for (double t : opt.times) {
    for (std::size_t i = 0; i < xs.size(); ++i) moved[i] = evaluate(s, xs[i], t);
    for (const TestFunction& u : catalog) {
      for (std::size_t i = 0; i < xs.size(); ++i) tu[i] = u(moved[i]);
      PropertyReport c = check_continuity(xs, tu, opt.continuity_tol);
      cont.residual = std::max(cont.residual, c.residual);
      if (c.fails()) {
        cont.verdict = Verdict::fails;
        for (Witness w : c.witnesses) {
          w.inputs.insert(w.inputs.begin(), t);
          w.note = u.name + ": " + w.note;
          cont.witnesses.push_back(std::move(w));
        }
      }
      // Vanishing at infinity: small at the farthest probe and not growing
      // along the probe sequence.
      for (double sign : {-1.0, 1.0}) {
        double previous = kInf;
        for (double m : {2.0, 4.0, 8.0}) {
          const double x = sign * m * opt.radius;
          const double v = std::abs(u(evaluate(s, x, t)));
          const bool farthest = m == 8.0;
          if (farthest) decay.residual = std::max(decay.residual, v);
          if ((farthest && v > opt.decay_tol) || v > previous + opt.decay_tol) {
            decay.verdict = Verdict::fails;
            decay.witnesses.push_back({{t, x}, v, farthest ? 0.0 : previous, u.name});
          }
          previous = v;
        }
      }
    }
  }

  const std::size_t stride = std::size_t{1} << std::max(0, opt.level - opt.f2_level);
  for (std::size_t i = 0; i < xs.size(); i += stride) {
    const double x = xs[i];
    for (const TestFunction& u : catalog) {
      const double ux = u(x);
      double last = 0.0;
      for (int k = opt.f2_min_k; k <= opt.f2_max_k; ++k) last = std::abs(u(evaluate(s, x, std::ldexp(1.0, -k))) - ux);
      f2.residual = std::max(f2.residual, last);
      if (last > opt.f2_tol) {
        f2.verdict = Verdict::fails;
        f2.witnesses.push_back({{x, std::ldexp(1.0, -opt.f2_max_k)}, last, 0.0, u.name});
      }
    }
  }
  for (PropertyReport* r : {&cont, &decay, &f2}) {
    sort_witnesses(*r);
    if (r->witnesses.size() > 8) r->witnesses.resize(8);
  }
  return conjunction("feller_numeric", {cont, decay, f2});
}

// ---------------------------------------------------------------------------
// Drift, generator, symbol

/// Φ'(Φ⁻¹(x)) on monotone domains, 0 on ⊙ domains, nullopt where the right
/// derivative does not settle.
inline DerivativeEstimate drift_estimate(const Structure& s, double x) {
  const Domain& d = s[locate_domain(s, x).index];
  if (!d.is_monotone()) return {0.0, 0.0, true};
  const GeneratingPath& p = *d.path;
  return right_derivative(p, detail::inverse_unchecked(p, x));
}

inline std::optional<double> ito_drift(const Structure& s, double x) {
  const DerivativeEstimate e = drift_estimate(s, x);
  if (!e.converged) return std::nullopt;
  return e.value;
}

/// Au(x) = u'(x) Φ'(Φ⁻¹(x)).
inline double generator_apply(const Structure& s, const TestFunction& u, double x) {
  const DerivativeEstimate e = drift_estimate(s, x);
  if (!e.converged)
    throw GeneratorUndefined("generator_apply: derivative of the generating path does not converge at x = " +
                                 format_real(x),
                             e);
  return u.derivative(x) * e.value;
}

/// (T_t u(x) - u(x)) / t.
inline double generator_quotient(const Structure& s, const TestFunction& u, double x, double t) {
  return (u(evaluate(s, x, t)) - u(x)) / t;
}

struct SymbolValue {
  double real_part = 0.0;
  double imag_part = 0.0;
};

/// p(x, ξ) = -i ξ Φ'(Φ⁻¹(x)); zero on ⊙ domains.
inline SymbolValue symbol(const Structure& s, double x, double xi) {
  const DerivativeEstimate e = drift_estimate(s, x);
  if (!e.converged) throw SymbolUndefined("symbol: drift undefined at x = " + format_real(x), e);
  return {0.0, e.value == 0.0 ? 0.0 : -xi * e.value};
}

struct SymbolEstimate {
  SymbolValue value;
  bool converged = false;
  std::vector<double> times;
  std::vector<SymbolValue> raw;  // per-time quotients
};

inline std::vector<double> halving_times(int k_min = 8, int k_max = 16) {
  std::vector<double> ts;
  for (int k = k_min; k <= k_max; ++k) ts.push_back(std::ldexp(1.0, -k));
  return ts;
}

/// -(e^{i(X_{t∧σ} - x)ξ} - 1)/t along decreasing t, σ the exit time of
/// [x - r, x + r], extrapolated by Richardson steps over the last three t's.
inline SymbolEstimate symbol_via_limit(const Structure& s, double x, double xi,
                                       const std::vector<double>& times = halving_times(), double r = 1.0,
                                       double tol = 1e-6) {
  if (times.size() < 3) throw DomainError("symbol_via_limit: need at least three times");
  if (!(r > 0)) throw DomainError("symbol_via_limit: radius must be positive");
  SymbolEstimate out;
  out.times = times;
  for (double t : times) {
    // Paths are continuous and monotone, so the stopped path sits on the
    // boundary of the neighborhood once it has left.
    const double delta = std::clamp(evaluate(s, x, t) - x, -r, r);
    const double h = 0.5 * delta * xi;
    out.raw.push_back({2.0 * std::sin(h) * std::sin(h) / t, -std::sin(delta * xi) / t});
  }
  const std::size_t n = times.size();
  auto richardson = [&](std::size_t k, double SymbolValue::*part) {
    const double ratio = times[k - 1] / times[k];
    return (ratio * out.raw[k].*part - out.raw[k - 1].*part) / (ratio - 1.0);
  };
  const SymbolValue r1{richardson(n - 2, &SymbolValue::real_part), richardson(n - 2, &SymbolValue::imag_part)};
  const SymbolValue r2{richardson(n - 1, &SymbolValue::real_part), richardson(n - 1, &SymbolValue::imag_part)};
  out.value = r2;
  out.converged = std::abs(r2.real_part - r1.real_part) <= 10.0 * tol && std::abs(r2.imag_part - r1.imag_part) <= 10.0 * tol;
  return out;
}

/// Semimartingale characteristics (B, C, ν) of X^x: B_t = X_t^x - x, C and ν
/// vanish for continuous paths of finite variation.
struct Characteristics {
  std::function<double(double)> drift_B;
  double quadratic_C = 0.0;
  double jump_nu = 0.0;
};

inline Characteristics characteristics(const Structure& s, double x) {
  return {[&s, x](double t) { return evaluate(s, x, t) - x; }, 0.0, 0.0};
}

// ---------------------------------------------------------------------------
// Richness and Itô drift over a grid

struct GridOptions {
  double radius = 8.0;
  int level = 14;
  double tol = 0.05;
  double transition_tol = 1e-3;
};

inline PropertyReport check_ito_drift(const Structure& s, const GridOptions& g = {},
                                      const std::function<double(double)>& expected = {}) {
  PropertyReport r{"ito", Verdict::holds, 0.0, {}, {}};
  for (double x : dyadic_window(g.radius, g.level)) {
    const DerivativeEstimate e = drift_estimate(s, x);
    if (!e.converged) {
      r.witnesses.push_back({{x}, e.value, NAN, "drift undefined"});
      continue;
    }
    if (expected) {
      const double want = expected(x);
      const double gap = std::abs(e.value - want);
      r.residual = std::max(r.residual, gap);
      if (gap > 1e-6 * (1.0 + std::abs(want))) r.witnesses.push_back({{x}, e.value, want, "drift mismatch"});
    }
  }
  if (!r.witnesses.empty()) r.verdict = Verdict::fails;
  if (r.witnesses.size() > 8) r.witnesses.resize(8);
  return r;
}

/// At every boundary between a monotone domain and a ⊙ domain the drift must
/// tend to 0 from inside the monotone domain.
inline PropertyReport check_smooth_transitions(const Structure& s, const GridOptions& g = {}) {
  PropertyReport r{"smooth_transition", Verdict::holds, 0.0, {}, {}};
  for (std::size_t j = 0; j < s.size(); ++j) {
    const Domain& d = s[j];
    if (!d.is_monotone()) continue;
    auto boundary = [&](double b, bool owned, double inward) {
      const double x = owned ? b : b + inward * std::ldexp(1.0 + std::abs(b), -30);
      const DerivativeEstimate e = right_derivative(*d.path, detail::inverse_unchecked(*d.path, x));
      r.residual = std::max(r.residual, std::abs(e.value));
      if (!e.converged || std::abs(e.value) > g.transition_tol) {
        r.verdict = Verdict::fails;
        r.witnesses.push_back({{x}, e.value, 0.0, "no smooth transition into the ⊙ domain at " + format_real(b)});
      }
    };
    if (j > 0 && s[j - 1].kind == Kind::constant) boundary(d.J.lo, d.J.lo_closed, 1.0);
    if (j + 1 < s.size() && s[j + 1].kind == Kind::constant) boundary(d.J.hi, d.J.hi_closed, -1.0);
  }
  return r;
}

/// Numerical richness: the drift exists on the grid and is continuous at grid
/// resolution, every monotone/⊙ boundary is a smooth transition (drift tends
/// to 0), and x -> Au(x) is continuous for the catalog. Can refute but never
/// prove richness.
inline PropertyReport is_rich(const Structure& s, const GridOptions& g = {},
                              const std::vector<TestFunction>& catalog = test_function_catalog()) {
  PropertyReport r{"rich", Verdict::holds, 0.0, {}, {}};
  const std::vector<double> xs = dyadic_window(g.radius, g.level);
  std::vector<double> ell(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const DerivativeEstimate e = drift_estimate(s, xs[i]);
    if (!e.converged) {
      r.verdict = Verdict::fails;
      r.witnesses.push_back({{xs[i]}, e.value, NAN, "derivative of the generating path does not converge"});
      return r;
    }
    ell[i] = e.value;
  }
  PropertyReport dcont = check_continuity(xs, ell, g.tol, "drift_continuity");
  if (dcont.fails()) {
    r.verdict = Verdict::fails;
    for (Witness& w : dcont.witnesses) r.witnesses.push_back({w.inputs, w.observed, w.expected, "drift jumps: " + w.note});
    return r;
  }

  PropertyReport smooth = check_smooth_transitions(s, g);
  if (smooth.fails()) {
    r.verdict = Verdict::fails;
    r.witnesses = smooth.witnesses;
  }
  if (r.fails()) return r;

  std::vector<double> au(xs.size());
  for (const TestFunction& u : catalog) {
    for (std::size_t i = 0; i < xs.size(); ++i) au[i] = u.derivative(xs[i]) * ell[i];
    PropertyReport c = check_continuity(xs, au, g.tol, "generator_continuity");
    if (c.fails()) {
      r.verdict = Verdict::fails;
      for (Witness& w : c.witnesses) r.witnesses.push_back({w.inputs, w.observed, w.expected, u.name + ": " + w.note});
    }
  }
  r.residual = dcont.residual;
  if (r.holds()) r.notes.push_back("supported at grid resolution 2^-" + std::to_string(g.level) + " of the window");
  return r;
}

// ---------------------------------------------------------------------------
// Absolute-continuity defect

struct AcDefect {
  double removed_increment_sum = 0.0;
  double total_increment = 0.0;
  double defect = 0.0;
};

inline constexpr int kMaxAcLevel = 24;

namespace detail {

// Φ at num / 3^power, exact in the ternary digits for unshifted Cantor rules.
inline double value_at_ternary(const GeneratingPath& p, std::uint64_t num, unsigned power, std::uint64_t pow3) {
  if (const auto* c = std::get_if<rules::Cantor>(&p.rule()); c && p.shift() == 0.0 && num <= pow3) {
    const double y = static_cast<double>(num) / static_cast<double>(pow3);
    if (num == pow3) return 1.0;
    return 0.5 * (cantor_h_ternary(num, power, c->depth) + y);
  }
  return p.value(static_cast<double>(num) / static_cast<double>(pow3));
}

}  // namespace detail

/// Increment of p over [0, 1] against the part carried by the middle thirds
/// removed up to level n.
inline AcDefect ac_defect(const GeneratingPath& p, int n) {
  if (n < 1 || n > kMaxAcLevel) throw DomainError("ac_defect: level must be in [1, " + std::to_string(kMaxAcLevel) + "]");
  if (!(p.domain().closure_contains(0.0) && p.domain().closure_contains(1.0)))
    throw DomainError("ac_defect: path must be defined on [0, 1]");
  // Neumaier summation over the 2^n - 1 removed intervals.
  double sum = 0.0, comp = 0.0;
  std::vector<std::uint64_t> cells{0};  // left numerators of surviving cells at level k-1
  std::uint64_t pow3 = 1;
  for (int k = 1; k <= n; ++k) {
    pow3 *= 3;
    std::vector<std::uint64_t> next;
    next.reserve(cells.size() * 2);
    for (std::uint64_t c : cells) {
      const double inc = detail::value_at_ternary(p, 3 * c + 2, k, pow3) - detail::value_at_ternary(p, 3 * c + 1, k, pow3);
      const double t = sum + inc;
      comp += std::abs(sum) >= std::abs(inc) ? (sum - t) + inc : (inc - t) + sum;
      sum = t;
      next.push_back(3 * c);
      next.push_back(3 * c + 2);
    }
    cells.swap(next);
  }
  AcDefect out;
  out.removed_increment_sum = sum + comp;
  out.total_increment = p.value(1.0) - p.value(0.0);
  out.defect = out.total_increment - out.removed_increment_sum;
  return out;
}

// ---------------------------------------------------------------------------
// Time change of the unit-speed translation

struct TimeChange {
  double A = 0.0;
  double Y = 0.0;
  double residual = 0.0;
};

/// For a single monotone domain: A(u) = u + Φ⁻¹(x) and Φ(A(u)) = X_u^x.
inline TimeChange time_change_representation(const Structure& s, double x, double u) {
  if (s.size() != 1 || !s[0].is_monotone())
    throw UnsupportedRepresentation("time_change_representation: needs a single ⊕ or ⊖ domain, got " + s.signature());
  if (!(u >= 0.0)) throw DomainError("time_change_representation: u must be nonnegative");
  const GeneratingPath& p = *s[0].path;
  TimeChange tc;
  tc.A = u + detail::inverse_unchecked(p, x);
  tc.Y = p.value(tc.A);
  tc.residual = std::abs(tc.Y - evaluate(s, x, u));
  return tc;
}

}  // namespace dethunt
