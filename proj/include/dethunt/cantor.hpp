#pragma once

#include <cmath>
#include <cstdint>
#include <string>

#include "dethunt/error.hpp"

namespace dethunt {

inline constexpr int kDefaultCantorDepth = 64;

namespace detail {

inline void check_depth(int depth) {
  if (depth < 1) throw DomainError("cantor depth must be >= 1, got " + std::to_string(depth));
}

// Binary digits of the Cantor function from an exact ternary digit stream.
// `next_digit` yields successive ternary digits of y in {0,1,2}.
template <class DigitSource>
double cantor_from_ternary(DigitSource&& next_digit, int depth) {
  double result = 0.0;
  double weight = 0.5;
  for (int i = 0; i < depth; ++i, weight *= 0.5) {
    const int d = next_digit();
    if (d == 1) return result + weight;
    if (d == 2) result += weight;
  }
  return result;
}

}  // namespace detail

/// The Cantor function on [0,1], evaluated from the exact ternary expansion
/// of the double `y` and truncated after `depth` ternary digits.
///
/// The expansion is computed in 128-bit fixed point, so the digits are those
/// of the binary value actually passed in (inputs below 2^-72 are truncated
/// to 126 fractional bits, which perturbs the result by less than 2^-79).
inline double cantor_h(double y, int depth = kDefaultCantorDepth) {
  detail::check_depth(depth);
  if (!(y >= 0.0 && y <= 1.0))
    throw DomainError("cantor_h: y must lie in [0,1], got " + std::to_string(y));
  if (y == 0.0) return 0.0;
  if (y == 1.0) return 1.0;

  int exponent = 0;
  const double mantissa = std::frexp(y, &exponent);  // y = mantissa * 2^exponent
  using u128 = unsigned __int128;
  u128 num = static_cast<std::uint64_t>(std::ldexp(mantissa, 53));
  int frac_bits = 53 - exponent;  // y = num / 2^frac_bits
  constexpr int kMaxFracBits = 126;
  if (frac_bits > kMaxFracBits) {
    const int drop = frac_bits - kMaxFracBits;
    num = drop >= 64 ? 0 : (num >> drop);
    frac_bits = kMaxFracBits;
  }
  const u128 mask = (u128{1} << frac_bits) - 1;
  return detail::cantor_from_ternary(
      [&]() {
        num *= 3;
        const int d = static_cast<int>(num >> frac_bits);
        num &= mask;
        return d;
      },
      depth);
}

/// Largest power p with 3^p representable in 64 bits.
inline constexpr unsigned kMaxTernaryPower = 40;

/// The Cantor function at the rational y = numerator / 3^power, exactly.
/// Used where endpoints of removed middle thirds must not be rounded.
inline double cantor_h_ternary(std::uint64_t numerator, unsigned power,
                               int depth = kDefaultCantorDepth) {
  detail::check_depth(depth);
  if (power > kMaxTernaryPower) throw DomainError("cantor_h_ternary: power exceeds 40");
  std::uint64_t denom = 1;
  for (unsigned i = 0; i < power; ++i) denom *= 3;
  if (numerator > denom) throw DomainError("cantor_h_ternary: y must lie in [0,1]");
  if (numerator == denom) return 1.0;
  std::uint64_t place = denom;
  std::uint64_t rest = numerator;
  return detail::cantor_from_ternary(
      [&]() {
        if (place == 1) return 0;
        place /= 3;
        const int d = static_cast<int>(rest / place);
        rest %= place;
        return d;
      },
      depth);
}

/// g(y) = (h(y) + y) / 2, strictly increasing bijection of [0,1].
inline double cantor_g(double y, int depth = kDefaultCantorDepth) {
  return 0.5 * (cantor_h(y, depth) + y);
}

/// Strictly increasing continuous bijection of the real line built from g
/// on each unit cell: x -> g(x - floor x) + floor x.
inline double cantor_phi(double x, int depth = kDefaultCantorDepth) {
  detail::check_depth(depth);
  if (!std::isfinite(x)) throw DomainError("cantor_phi: argument must be finite");
  const double cell = std::floor(x);
  return cantor_g(x - cell, depth) + cell;
}

/// Inverse of g on [0,1] by bisection down to adjacent doubles.
inline double cantor_g_inverse(double v, int depth = kDefaultCantorDepth) {
  if (!(v >= 0.0 && v <= 1.0)) throw DomainError("cantor_g_inverse: value must lie in [0,1]");
  if (v == 0.0 || v == 1.0) return v;
  double lo = 0.0;
  double hi = 1.0;
  for (;;) {
    const double mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi) break;
    if (cantor_g(mid, depth) < v) lo = mid;
    else hi = mid;
  }
  return std::abs(cantor_g(lo, depth) - v) < std::abs(cantor_g(hi, depth) - v) ? lo : hi;
}

inline double cantor_phi_inverse(double x, int depth = kDefaultCantorDepth) {
  if (!std::isfinite(x)) throw DomainError("cantor_phi_inverse: argument must be finite");
  const double cell = std::floor(x);
  return cell + cantor_g_inverse(x - cell, depth);
}

}  // namespace dethunt
