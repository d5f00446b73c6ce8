#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <string>

namespace dethunt {

/// A deterministic Markov family generated by one base trajectory: starts
/// visited by the base trajectory follow it from their first visit, all other
/// starts stay put. Such families need not be Hunt; they are the raw inputs
/// for shape and variation checks.
struct RawFamily {
  std::string name;
  double origin = 0.0;
  std::function<double(double)> base;                     // t -> X_t^origin
  std::function<std::optional<double>(double)> visit_time;  // x -> first t with X_t^origin = x

  double operator()(double x, double t) const {
    const std::optional<double> tx = visit_time(x);
    return tx ? base(*tx + t) : x;
  }
};

namespace detail {

/// For t in [0, 1): the m >= 0 with 1 - t in (2^-(m+1), 2^-m]. 1 - t is exact
/// for t >= 1/2, so block membership is decided without rounding.
inline int dyadic_block(double t) {
  if (t < 0.5) return 0;
  int e = 0;
  const double f = std::frexp(1.0 - t, &e);  // 1 - t = f * 2^e, f in [1/2, 1)
  return f == 0.5 ? 1 - e : -e;
}

inline bool zigzag_up(double t) { return dyadic_block(t) % 2 == 0; }

/// Example of the cadlag family: within block n the offset from the block
/// start is cut into pieces of length 4^-(n+1); even pieces belong to A.
inline bool cadlag_in_a(double t) {
  const int n = dyadic_block(t);
  const double offset = n == 0 ? t : t - (1.0 - std::ldexp(1.0, -n));
  const double q = std::floor(std::ldexp(offset, 2 * (n + 1)));
  return std::fmod(q, 2.0) == 0.0;
}

}  // namespace detail

/// Zig-zag from 0: t on the blocks [1 - 4^-n, 1 - 2·4^-(n+1)), -t on the
/// blocks in between, 0 from time 1 on. Jumps at every block boundary.
inline double zigzag_base(double t) {
  if (t >= 1.0) return 0.0;
  return detail::zigzag_up(t) ? t : -t;
}

inline RawFamily zigzag_family() {
  RawFamily f;
  f.name = "e2_9";
  f.origin = 0.0;
  f.base = zigzag_base;
  f.visit_time = [](double x) -> std::optional<double> {
    if (x == 0.0) return 0.0;
    if (x > 0.0 && x < 1.0 && detail::zigzag_up(x)) return x;
    if (x < 0.0 && x > -1.0 && !detail::zigzag_up(-x)) return -x;
    return std::nullopt;
  };
  return f;
}

/// Cadlag path from -1: -1 + t on A, 1 - t on B, 0 from time 1 on.
inline double cadlag_base(double t) {
  if (t >= 1.0) return 0.0;
  return detail::cadlag_in_a(t) ? -1.0 + t : 1.0 - t;
}

inline RawFamily cadlag_family() {
  RawFamily f;
  f.name = "cadlag_5_5";
  f.origin = -1.0;
  f.base = cadlag_base;
  f.visit_time = [](double x) -> std::optional<double> {
    if (x == 0.0) return 1.0;
    if (x >= -1.0 && x < 0.0) {
      const double t = x + 1.0;
      if (detail::cadlag_in_a(t)) return t;
    } else if (x > 0.0 && x <= 1.0) {
      const double t = 1.0 - x;
      if (!detail::cadlag_in_a(t)) return t;
    }
    return std::nullopt;
  };
  return f;
}

}  // namespace dethunt
