#pragma once

#include <cmath>
#include <limits>
#include <string>

#include "dethunt/error.hpp"
#include "dethunt/format.hpp"

namespace dethunt {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// An interval of the extended real line. Infinite endpoints are never
/// closed; a degenerate interval {a} is written [a,a].
struct Interval {
  double lo = -kInf;
  double hi = kInf;
  bool lo_closed = false;
  bool hi_closed = false;

  static Interval real_line() { return {}; }
  static Interval open(double a, double b) { return checked({a, b, false, false}); }
  static Interval closed(double a, double b) { return checked({a, b, true, true}); }
  static Interval closed_open(double a, double b) { return checked({a, b, true, false}); }
  static Interval open_closed(double a, double b) { return checked({a, b, false, true}); }
  static Interval point(double a) { return checked({a, a, true, true}); }

  /// Throws DomainError when the invariants do not hold.
  static Interval checked(Interval iv) {
    if (!iv.valid()) throw DomainError("invalid interval " + iv.str());
    return iv;
  }

  bool valid() const {
    if (std::isnan(lo) || std::isnan(hi)) return false;
    if (std::isinf(lo) && lo_closed) return false;
    if (std::isinf(hi) && hi_closed) return false;
    if (lo == kInf || hi == -kInf) return false;
    if (lo < hi) return true;
    return lo == hi && lo_closed && hi_closed;
  }

  bool degenerate() const { return lo == hi; }
  bool lower_bounded() const { return std::isfinite(lo); }
  bool upper_bounded() const { return std::isfinite(hi); }
  bool bounded() const { return lower_bounded() && upper_bounded(); }

  bool contains(double x) const {
    if (x < lo || x > hi) return false;
    if (x == lo && !lo_closed) return false;
    if (x == hi && !hi_closed) return false;
    return true;
  }

  /// Membership in the closure; used for bracketing at open endpoints.
  bool closure_contains(double x) const { return x >= lo && x <= hi; }

  Interval shifted(double delta) const {
    return {lo - delta, hi - delta, lo_closed, hi_closed};
  }

  std::string str() const;

  friend bool operator==(const Interval&, const Interval&) = default;
};

inline std::string Interval::str() const {
  std::string out;
  out += lo_closed ? '[' : '(';
  out += format_real(lo);
  out += ',';
  out += format_real(hi);
  out += hi_closed ? ']' : ')';
  return out;
}

}  // namespace dethunt

