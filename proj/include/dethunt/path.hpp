#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "dethunt/cantor.hpp"
#include "dethunt/error.hpp"
#include "dethunt/interval.hpp"

namespace dethunt {

enum class Direction { increasing, decreasing };

inline const char* to_string(Direction d) {
  return d == Direction::increasing ? "increasing" : "decreasing";
}

/// One sample (s, Φ(s)) of a tabulated or piecewise-linear path.
struct Node {
  double s = 0.0;
  double v = 0.0;
  friend bool operator==(const Node&, const Node&) = default;
};

namespace rules {

/// Φ(u) = slope * u + intercept.
struct Linear {
  double slope = 1.0;
  double intercept = 0.0;
};

/// Piecewise linear through the nodes, extended linearly past both ends.
struct Polyline {
  std::vector<Node> nodes;
};

/// Monotone cubic Hermite interpolation (Fritsch-Butland slopes) through the
/// nodes, extended linearly with the end secants.
struct Table {
  std::vector<Node> nodes;
  std::vector<double> slopes;
};

/// The Cantor path g(u - floor u) + floor u.
struct Cantor {
  int depth = kDefaultCantorDepth;
};

/// outer_scale * cantor_phi(inner_scale * u + inner_shift) + outer_shift.
struct AffineCantor {
  int depth = kDefaultCantorDepth;
  double outer_scale = 1.0;
  double inner_scale = 1.0;
  double inner_shift = 0.0;
  double outer_shift = 0.0;
};

/// Closed-form paths addressable by name from the text format:
///   cubic   : u + u^3 on the real line
///   rise_sq : 1 + u^2 on [0, inf)
///   fall_sq : -1 - u^2 on [0, inf)
struct Builtin {
  std::string name;
};

/// Arbitrary user function. Not serializable.
struct Callable {
  std::string name;
  std::function<double(double)> fn;
  Interval natural;
  Interval image;
  Direction direction = Direction::increasing;
};

}  // namespace rules

using PathRule = std::variant<rules::Linear, rules::Polyline, rules::Table, rules::Cantor,
                              rules::AffineCantor, rules::Builtin, rules::Callable>;

/// Result of a forward-difference derivative estimate.
struct DerivativeEstimate {
  double value = 0.0;
  double step_used = 0.0;
  bool converged = false;
};

inline constexpr double kDefaultInvertTol = 1e-12;
inline constexpr double kDerivativeRelTol = 1e-6;
inline constexpr double kDerivativeAbsTol = 1e-9;
inline constexpr double kBracketClip = 1e12;

namespace detail {

inline bool strictly_monotone(const std::vector<Node>& nodes, Direction& dir) {
  if (nodes.size() < 2) return false;
  for (std::size_t i = 1; i < nodes.size(); ++i)
    if (!(nodes[i].s > nodes[i - 1].s)) return false;
  const bool up = nodes[1].v > nodes[0].v;
  for (std::size_t i = 1; i < nodes.size(); ++i) {
    const double dv = nodes[i].v - nodes[i - 1].v;
    if (up ? !(dv > 0) : !(dv < 0)) return false;
  }
  dir = up ? Direction::increasing : Direction::decreasing;
  return true;
}

inline std::vector<double> pchip_slopes(const std::vector<Node>& n) {
  const std::size_t count = n.size();
  std::vector<double> h(count - 1), delta(count - 1), m(count);
  for (std::size_t i = 0; i + 1 < count; ++i) {
    h[i] = n[i + 1].s - n[i].s;
    delta[i] = (n[i + 1].v - n[i].v) / h[i];
  }
  if (count == 2) {
    m[0] = m[1] = delta[0];
    return m;
  }
  for (std::size_t i = 1; i + 1 < count; ++i) {
    const double w1 = 2 * h[i] + h[i - 1];
    const double w2 = h[i] + 2 * h[i - 1];
    m[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
  }
  // Non-centered three-point end slopes, limited to keep monotonicity.
  auto end_slope = [](double h0, double h1, double d0, double d1) {
    double d = ((2 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if (std::signbit(d) != std::signbit(d0)) return 0.0;
    if (std::signbit(d0) != std::signbit(d1) && std::abs(d) > std::abs(3 * d0)) return 3 * d0;
    return d;
  };
  m[0] = end_slope(h[0], h[1], delta[0], delta[1]);
  m[count - 1] = end_slope(h[count - 2], h[count - 3], delta[count - 2], delta[count - 3]);
  return m;
}

inline double polyline_value(const std::vector<Node>& n, double u) {
  std::size_t i;
  if (u <= n.front().s) i = 0;
  else if (u >= n.back().s) i = n.size() - 2;
  else i = static_cast<std::size_t>(std::upper_bound(n.begin(), n.end(), u,
                                                     [](double a, const Node& b) { return a < b.s; }) -
                                    n.begin()) - 1;
  const Node& a = n[i];
  const Node& b = n[i + 1];
  if (u == a.s) return a.v;
  if (u == b.s) return b.v;
  return a.v + (b.v - a.v) * ((u - a.s) / (b.s - a.s));
}

inline double polyline_slope_right(const std::vector<Node>& n, double u) {
  std::size_t i;
  if (u < n.front().s) i = 0;
  else if (u >= n.back().s) i = n.size() - 2;
  else i = static_cast<std::size_t>(std::upper_bound(n.begin(), n.end(), u,
                                                     [](double a, const Node& b) { return a < b.s; }) -
                                    n.begin()) - 1;
  return (n[i + 1].v - n[i].v) / (n[i + 1].s - n[i].s);
}

inline std::optional<double> polyline_inverse(const std::vector<Node>& n, double x) {
  const bool up = n.back().v > n.front().v;
  auto below = [&](double v) { return up ? v < x : v > x; };
  std::size_t i;
  if (!below(n.front().v)) i = 0;
  else if (below(n.back().v)) i = n.size() - 2;
  else {
    i = 0;
    while (i + 2 < n.size() && below(n[i + 1].v)) ++i;
  }
  const Node& a = n[i];
  const Node& b = n[i + 1];
  if (x == a.v) return a.s;
  if (x == b.v) return b.s;
  return a.s + (b.s - a.s) * ((x - a.v) / (b.v - a.v));
}

inline double table_value(const rules::Table& t, double u) {
  const auto& n = t.nodes;
  if (u <= n.front().s) {
    const double secant = (n[1].v - n[0].v) / (n[1].s - n[0].s);
    return n.front().v + secant * (u - n.front().s);
  }
  if (u >= n.back().s) {
    const std::size_t k = n.size() - 1;
    const double secant = (n[k].v - n[k - 1].v) / (n[k].s - n[k - 1].s);
    return n.back().v + secant * (u - n.back().s);
  }
  const std::size_t i = static_cast<std::size_t>(
                            std::upper_bound(n.begin(), n.end(), u,
                                             [](double a, const Node& b) { return a < b.s; }) -
                            n.begin()) - 1;
  const double h = n[i + 1].s - n[i].s;
  const double r = (u - n[i].s) / h;
  const double r2 = r * r;
  const double r3 = r2 * r;
  const double h00 = 2 * r3 - 3 * r2 + 1;
  const double h10 = r3 - 2 * r2 + r;
  const double h01 = -2 * r3 + 3 * r2;
  const double h11 = r3 - r2;
  return h00 * n[i].v + h10 * h * t.slopes[i] + h01 * n[i + 1].v + h11 * h * t.slopes[i + 1];
}

inline double base_value(const PathRule& rule, double u) {
  return std::visit(
      [u](const auto& r) -> double {
        using R = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<R, rules::Linear>) {
          return r.slope * u + r.intercept;
        } else if constexpr (std::is_same_v<R, rules::Polyline>) {
          return polyline_value(r.nodes, u);
        } else if constexpr (std::is_same_v<R, rules::Table>) {
          return table_value(r, u);
        } else if constexpr (std::is_same_v<R, rules::Cantor>) {
          return cantor_phi(u, r.depth);
        } else if constexpr (std::is_same_v<R, rules::AffineCantor>) {
          return r.outer_scale * cantor_phi(r.inner_scale * u + r.inner_shift, r.depth) +
                 r.outer_shift;
        } else if constexpr (std::is_same_v<R, rules::Builtin>) {
          if (r.name == "cubic") return u + u * u * u;
          if (r.name == "rise_sq") return 1.0 + u * u;
          return -1.0 - u * u;  // fall_sq
        } else {
          return r.fn(u);
        }
      },
      rule);
}

inline bool is_known_builtin(std::string_view name) {
  return name == "cubic" || name == "rise_sq" || name == "fall_sq";
}

// Domain on which the rule itself is defined and strictly monotone.
inline Interval natural_domain(const PathRule& rule) {
  if (const auto* b = std::get_if<rules::Builtin>(&rule)) {
    if (b->name == "rise_sq" || b->name == "fall_sq") return {0.0, kInf, true, false};
  }
  if (const auto* c = std::get_if<rules::Callable>(&rule)) return c->natural;
  return Interval::real_line();
}

inline Direction rule_direction(const PathRule& rule) {
  return std::visit(
      [](const auto& r) -> Direction {
        using R = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<R, rules::Linear>) {
          if (r.slope == 0.0 || !std::isfinite(r.slope))
            throw DomainError("linear path needs a finite nonzero slope");
          return r.slope > 0 ? Direction::increasing : Direction::decreasing;
        } else if constexpr (std::is_same_v<R, rules::Polyline> || std::is_same_v<R, rules::Table>) {
          Direction d{};
          if (!strictly_monotone(r.nodes, d))
            throw DomainError("path nodes must be strictly increasing in s and strictly monotone in value");
          return d;
        } else if constexpr (std::is_same_v<R, rules::Cantor>) {
          check_depth(r.depth);
          return Direction::increasing;
        } else if constexpr (std::is_same_v<R, rules::AffineCantor>) {
          check_depth(r.depth);
          const double sign = r.outer_scale * r.inner_scale;
          if (sign == 0.0 || !std::isfinite(sign))
            throw DomainError("affine cantor path needs nonzero finite scales");
          return sign > 0 ? Direction::increasing : Direction::decreasing;
        } else if constexpr (std::is_same_v<R, rules::Builtin>) {
          if (!is_known_builtin(r.name)) throw DomainError("unknown builtin path '" + r.name + "'");
          return r.name == "fall_sq" ? Direction::decreasing : Direction::increasing;
        } else {
          if (!r.fn) throw DomainError("callable path without a function");
          return r.direction;
        }
      },
      rule);
}

}  // namespace detail

/// A strictly monotone continuous surjection Φ : I -> J.
///
/// The value at s is rule(s + shift); the shift carries re-parameterizations
/// (Φ(0) = anchor) without touching the rule, so the rule stays serializable.
/// Immutable after construction.
class GeneratingPath {
 public:
  GeneratingPath(PathRule rule, Interval domain, double shift = 0.0)
      : rule_(std::move(rule)), domain_(Interval::checked(domain)), shift_(shift) {
    if (auto* t = std::get_if<rules::Table>(&rule_); t && t->slopes.size() != t->nodes.size()) {
      if (t->nodes.size() < 2) throw DomainError("table path needs at least two nodes");
      t->slopes = detail::pchip_slopes(t->nodes);
    }
    direction_ = detail::rule_direction(rule_);
    if (domain_.degenerate()) throw DomainError("generating path needs a nondegenerate domain");
    const Interval natural = detail::natural_domain(rule_).shifted(shift_);
    if (!(domain_.lo >= natural.lo && domain_.hi <= natural.hi) ||
        (domain_.lo == natural.lo && domain_.lo_closed && !natural.lo_closed && std::isfinite(domain_.lo)))
      throw DomainError("domain " + domain_.str() + " exceeds the rule's natural domain " + natural.str());
    range_ = compute_range();
  }

  static GeneratingPath linear(double slope, double intercept,
                               Interval domain = Interval::real_line()) {
    return {rules::Linear{slope, intercept}, domain};
  }
  static GeneratingPath polyline(std::vector<Node> nodes, Interval domain = Interval::real_line()) {
    if (nodes.size() < 2) throw DomainError("polyline needs at least two nodes");
    return {rules::Polyline{std::move(nodes)}, domain};
  }
  static GeneratingPath table(std::vector<Node> nodes, Interval domain = Interval::real_line()) {
    if (nodes.size() < 2) throw DomainError("table path needs at least two nodes");
    return {rules::Table{std::move(nodes), {}}, domain};
  }
  static GeneratingPath cantor(int depth = kDefaultCantorDepth,
                               Interval domain = Interval::real_line()) {
    return {rules::Cantor{depth}, domain};
  }
  static GeneratingPath affine_cantor(double outer_scale, double inner_scale, double inner_shift,
                                      double outer_shift, Interval domain = Interval::real_line(),
                                      int depth = kDefaultCantorDepth) {
    return {rules::AffineCantor{depth, outer_scale, inner_scale, inner_shift, outer_shift}, domain};
  }
  static GeneratingPath builtin(std::string name, Interval domain) {
    return {rules::Builtin{std::move(name)}, domain};
  }
  /// `image` is the range of fn over `natural`; limits at infinite ends of
  /// the domain are taken from it.
  static GeneratingPath callable(std::function<double(double)> fn, Interval domain,
                                 Direction direction, Interval image = Interval::real_line(),
                                 std::string name = "callable") {
    return {rules::Callable{std::move(name), std::move(fn), Interval::real_line(), image, direction},
            domain};
  }

  const PathRule& rule() const { return rule_; }
  const Interval& domain() const { return domain_; }
  const Interval& range() const { return range_; }
  Direction direction() const { return direction_; }
  bool increasing() const { return direction_ == Direction::increasing; }
  double shift() const { return shift_; }
  bool serializable() const { return !std::holds_alternative<rules::Callable>(rule_); }

  /// Φ(s) without the membership check (s in the closure of the domain).
  double value(double s) const { return detail::base_value(rule_, s + shift_); }

  /// Re-parameterized path s -> Φ(s + delta) on domain - delta.
  GeneratingPath shifted(double delta) const {
    return GeneratingPath(rule_, domain_.shifted(delta), shift_ + delta);
  }

  GeneratingPath with_domain(Interval domain) const { return GeneratingPath(rule_, domain, shift_); }

  /// Closed-form right derivative for piecewise-affine rules.
  std::optional<double> exact_right_derivative(double s) const {
    const double u = s + shift_;
    if (const auto* l = std::get_if<rules::Linear>(&rule_)) return l->slope;
    if (const auto* p = std::get_if<rules::Polyline>(&rule_))
      return detail::polyline_slope_right(p->nodes, u);
    return std::nullopt;
  }

  /// Closed-form inverse where available; nullopt means "bisect".
  std::optional<double> exact_inverse(double x) const {
    return std::visit(
        [&](const auto& r) -> std::optional<double> {
          using R = std::decay_t<decltype(r)>;
          if constexpr (std::is_same_v<R, rules::Linear>) {
            return (x - r.intercept) / r.slope - shift_;
          } else if constexpr (std::is_same_v<R, rules::Polyline>) {
            return *detail::polyline_inverse(r.nodes, x) - shift_;
          } else if constexpr (std::is_same_v<R, rules::Cantor>) {
            return cantor_phi_inverse(x, r.depth) - shift_;
          } else if constexpr (std::is_same_v<R, rules::AffineCantor>) {
            const double w = cantor_phi_inverse((x - r.outer_shift) / r.outer_scale, r.depth);
            return (w - r.inner_shift) / r.inner_scale - shift_;
          } else if constexpr (std::is_same_v<R, rules::Builtin>) {
            if (r.name == "rise_sq") return std::sqrt(std::max(0.0, x - 1.0)) - shift_;
            if (r.name == "fall_sq") return std::sqrt(std::max(0.0, -1.0 - x)) - shift_;
            return std::nullopt;
          } else {
            return std::nullopt;
          }
        },
        rule_);
  }

 private:
  Interval compute_range() const {
    const bool up = increasing();
    auto limit_at = [&](double s, bool upper_end) {
      if (std::isfinite(s)) return value(s);
      if (const auto* c = std::get_if<rules::Callable>(&rule_)) {
        const bool toward_hi = (upper_end == up);
        return toward_hi ? c->image.hi : c->image.lo;
      }
      return (upper_end == up) ? kInf : -kInf;
    };
    const double a = limit_at(domain_.lo, false);
    const double b = limit_at(domain_.hi, true);
    Interval r = up ? Interval{a, b, domain_.lo_closed, domain_.hi_closed}
                    : Interval{b, a, domain_.hi_closed, domain_.lo_closed};
    if (std::isinf(r.lo)) r.lo_closed = false;
    if (std::isinf(r.hi)) r.hi_closed = false;
    if (!r.valid()) throw DomainError("path is not strictly monotone on " + domain_.str());
    return r;
  }

  PathRule rule_;
  Interval domain_;
  double shift_ = 0.0;
  Direction direction_ = Direction::increasing;
  Interval range_;
};

/// Φ(s) for s in the domain of p.
inline double eval_path(const GeneratingPath& p, double s) {
  const Interval& d = p.domain();
  if (!d.contains(s)) {
    const bool below = s < d.lo || (s == d.lo && !d.lo_closed);
    throw DomainError("eval_path: s = " + format_real(s) + " violates the " +
                      (below ? "lower" : "upper") + " endpoint of " + d.str());
  }
  return p.value(s);
}

namespace detail {

// Bisection to adjacent doubles on the closure of the domain. Targets beyond
// a finite end of the domain resolve to that end.
inline double bisect_inverse(const GeneratingPath& p, double x) {
  const Interval& d = p.domain();
  const bool up = p.increasing();
  auto below_target = [&](double s) { return up ? p.value(s) < x : p.value(s) > x; };

  double lo = std::isfinite(d.lo) ? d.lo : std::min(-kBracketClip, d.hi - 1.0);
  double hi = std::isfinite(d.hi) ? d.hi : std::max(kBracketClip, d.lo + 1.0);
  constexpr double kSearchBound = 1e300;
  while (std::isinf(d.lo) && !below_target(lo) && p.value(lo) != x) {
    if (lo < -kSearchBound) throw SearchFailure("invert_path: no lower bracket for x = " + format_real(x));
    lo *= 2.0;
  }
  while (std::isinf(d.hi) && below_target(hi)) {
    if (hi > kSearchBound) throw SearchFailure("invert_path: no upper bracket for x = " + format_real(x));
    hi *= 2.0;
  }
  if (!below_target(lo)) return lo;
  if (below_target(hi)) return hi;
  for (int guard = 0; guard < 4096; ++guard) {
    const double mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi) break;
    if (below_target(mid)) lo = mid;
    else hi = mid;
  }
  return std::abs(p.value(lo) - x) < std::abs(p.value(hi) - x) ? lo : hi;
}

// Inverse for x known to lie in (the closure of) the range, e.g. a point of
// the domain interval J that owns the path. Never throws RangeError.
inline double inverse_unchecked(const GeneratingPath& p, double x) {
  double s;
  if (auto exact = p.exact_inverse(x)) s = *exact;
  else s = bisect_inverse(p, x);
  // Rounding may land on an excluded endpoint; nudge back inside.
  const Interval& d = p.domain();
  if (s < d.lo || (s == d.lo && !d.lo_closed)) s = std::nextafter(d.lo, kInf);
  if (s > d.hi || (s == d.hi && !d.hi_closed)) s = std::nextafter(d.hi, -kInf);
  return s;
}

}  // namespace detail

/// Best inverse at double resolution, without the tolerance check. Throws
/// RangeError when x is outside the range of p.
inline double inverse_nearest(const GeneratingPath& p, double x) {
  if (!p.range().contains(x))
    throw RangeError("invert_path: x = " + format_real(x) + " outside range " + p.range().str());
  return detail::inverse_unchecked(p, x);
}

/// Φ⁻¹(x) with |Φ(s) - x| <= tol * max(1, |x|).
inline double invert_path(const GeneratingPath& p, double x, double tol = kDefaultInvertTol) {
  if (!(tol > 0)) throw DomainError("invert_path: tol must be positive");
  const double s = inverse_nearest(p, x);
  const double residual = std::abs(p.value(s) - x);
  if (residual > tol * std::max(1.0, std::abs(x)))
    throw SearchFailure("invert_path: residual " + format_real(residual) + " at x = " +
                        format_real(x) + " exceeds tol " + format_real(tol));
  return s;
}

/// Right-hand derivative of Φ at s by halving forward differences.
///
/// Converged once two consecutive halvings agree within the derivative
/// tolerance (relative 1e-6, absolute floor 1e-9); the reported value is the
/// Richardson combination of the last two quotients.
inline DerivativeEstimate right_derivative(const GeneratingPath& p, double s, double h0 = 1e-3,
                                           int max_halvings = 40) {
  if (!(h0 > 0)) throw DomainError("right_derivative: h0 must be positive");
  const Interval& d = p.domain();
  if (!d.contains(s)) throw DomainError("right_derivative: s = " + format_real(s) + " outside " + d.str());
  if (s >= d.hi) throw DerivativeUndefined("right_derivative: no forward room at " + format_real(s));
  if (auto exact = p.exact_right_derivative(s)) return {*exact, 0.0, true};

  double h = std::isfinite(d.hi) ? std::min(h0, 0.5 * (d.hi - s)) : h0;
  const double base = p.value(s);
  double previous = (p.value(s + h) - base) / h;
  int agreements = 0;
  for (int k = 1; k <= max_halvings; ++k) {
    h *= 0.5;
    const double q = (p.value(s + h) - base) / h;
    const double gap = std::abs(q - previous);
    agreements = gap <= std::max(kDerivativeRelTol * std::abs(q), kDerivativeAbsTol) ? agreements + 1 : 0;
    if (agreements >= 2) return {2.0 * q - previous, h, true};
    previous = q;
  }
  return {previous, h, false};
}

/// Two-column whitespace separated numeric text; '#' starts a comment.
/// The first column must be strictly increasing.
inline std::vector<Node> parse_nodes(std::string_view text) {
  std::vector<Node> nodes;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream fields(line);
    std::string a, b, extra;
    if (!(fields >> a)) continue;
    if (!(fields >> b) || (fields >> extra))
      throw FormatError("node table line " + std::to_string(line_no) + ": expected two columns");
    auto parse = [&](const std::string& tok) {
      double v = 0;
      auto [end, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
      if (ec != std::errc{} || end != tok.data() + tok.size() || !std::isfinite(v))
        throw FormatError("node table line " + std::to_string(line_no) + ": bad number '" + tok + "'");
      return v;
    };
    Node n{parse(a), parse(b)};
    if (!nodes.empty() && !(n.s > nodes.back().s))
      throw FormatError("node table line " + std::to_string(line_no) +
                        ": first column must be strictly increasing");
    nodes.push_back(n);
  }
  if (nodes.size() < 2) throw FormatError("node table needs at least two rows");
  return nodes;
}

inline std::string emit_nodes(const std::vector<Node>& nodes) {
  std::string out;
  for (const Node& n : nodes) out += format_real(n.s) + " " + format_real(n.v) + "\n";
  return out;
}

inline std::vector<Node> load_nodes(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot read node file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_nodes(buf.str());
}

}  // namespace dethunt
