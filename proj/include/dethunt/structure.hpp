#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dethunt/error.hpp"
#include "dethunt/format.hpp"
#include "dethunt/interval.hpp"
#include "dethunt/path.hpp"

namespace dethunt {

/// Initial motion on a domain: up (⊕), down (⊖) or at rest (⊙).
enum class Kind { plus, minus, constant };

inline const char* to_string(Kind k) {
  switch (k) {
    case Kind::plus: return "plus";
    case Kind::minus: return "minus";
    case Kind::constant: return "const";
  }
  return "const";
}

inline const char* glyph(Kind k) {
  switch (k) {
    case Kind::plus: return "⊕";
    case Kind::minus: return "⊖";
    case Kind::constant: return "⊙";
  }
  return "⊙";
}

/// One interval J of the state-space decomposition. Monotone kinds carry a
/// generating path onto J; `anchor` is the point x with Φ⁻¹(x) = 0.
struct Domain {
  Interval J;
  Kind kind = Kind::constant;
  std::optional<GeneratingPath> path;
  std::optional<double> anchor;

  static Domain constant(Interval j) { return {j, Kind::constant, std::nullopt, std::nullopt}; }

  /// Kind follows the direction of the path.
  static Domain monotone(Interval j, GeneratingPath p, std::optional<double> anchor = std::nullopt) {
    const Kind k = p.increasing() ? Kind::plus : Kind::minus;
    return {j, k, std::move(p), anchor};
  }

  bool is_monotone() const { return kind != Kind::constant; }
};

struct ValidationFault {
  std::string rule_id;
  std::vector<std::size_t> domains;
  std::string message;
};

struct ValidateOptions {
  bool require_canonical = false;
  std::size_t max_domains = 10000;
  double tol = 1e-9;
};

struct Location {
  std::size_t index = 0;
  bool at_lower_boundary = false;
  bool at_upper_boundary = false;
};

class Structure;
struct ValidationResult;
ValidationResult validate_structure(std::vector<Domain> raw, const ValidateOptions& opts);
Structure canonicalize(const Structure& s);

/// A validated, ordered partition of the real line into domains (bottom
/// first). Only obtainable through validate_structure or canonicalize.
class Structure {
 public:
  const std::vector<Domain>& domains() const { return domains_; }
  std::size_t size() const { return domains_.size(); }
  const Domain& operator[](std::size_t j) const { return domains_[j]; }
  bool canonical() const { return canonical_; }
  /// Admitted but noteworthy configurations found during validation.
  const std::vector<std::string>& notes() const { return notes_; }

  /// Kinds bottom to top, e.g. "⊖|⊙|⊕".
  std::string signature() const {
    std::string out;
    for (std::size_t j = 0; j < domains_.size(); ++j) {
      if (j) out += "|";
      out += glyph(domains_[j].kind);
    }
    return out;
  }

 private:
  Structure(std::vector<Domain> d, bool canonical, std::vector<std::string> notes)
      : domains_(std::move(d)), canonical_(canonical), notes_(std::move(notes)) {}

  friend ValidationResult validate_structure(std::vector<Domain> raw, const ValidateOptions& opts);

  std::vector<Domain> domains_;
  bool canonical_ = false;
  std::vector<std::string> notes_;
};

struct ValidationResult {
  std::optional<Structure> structure;
  std::vector<ValidationFault> faults;

  bool ok() const { return structure.has_value(); }
};

namespace detail {

inline bool near(double a, double b, double tol) {
  if (std::isinf(a) || std::isinf(b)) return a == b;
  return std::abs(a - b) <= tol * (1.0 + std::max(std::abs(a), std::abs(b)));
}

inline std::string domain_label(std::size_t j, const Domain& d) {
  return "domain " + std::to_string(j) + " (" + to_string(d.kind) + " " + d.J.str() + ")";
}

inline bool partition_ok(const std::vector<Domain>& d) {
  if (d.empty() || d.front().J.lo != -kInf || d.back().J.hi != kInf) return false;
  for (std::size_t j = 0; j < d.size(); ++j) {
    if (!d[j].J.valid()) return false;
    if (j + 1 < d.size()) {
      const Interval& a = d[j].J;
      const Interval& b = d[j + 1].J;
      if (a.hi != b.lo || a.hi_closed == b.lo_closed) return false;
    }
  }
  return true;
}

}  // namespace detail

inline ValidationResult validate_structure(std::vector<Domain> raw,
                                           const ValidateOptions& opts = {}) {
  ValidationResult result;
  auto fault = [&](std::string id, std::vector<std::size_t> idx, std::string msg) {
    result.faults.push_back({std::move(id), std::move(idx), std::move(msg)});
  };
  const std::size_t n = raw.size();

  // R1: nonempty, bounded count, ordered partition of the line.
  if (n == 0) fault("R1", {}, "structure has no domains");
  if (n > opts.max_domains)
    fault("R1", {}, "structure has " + std::to_string(n) + " domains, limit " +
                        std::to_string(opts.max_domains));
  for (std::size_t j = 0; j < n; ++j)
    if (!raw[j].J.valid()) fault("R1", {j}, detail::domain_label(j, raw[j]) + " is not a valid interval");
  if (n > 0) {
    if (raw.front().J.lo != -kInf)
      fault("R1", {0}, "lowest domain must start at -inf, found " + raw.front().J.str());
    if (raw.back().J.hi != kInf)
      fault("R1", {n - 1}, "highest domain must end at inf, found " + raw.back().J.str());
  }
  for (std::size_t j = 0; j + 1 < n; ++j) {
    const Interval& a = raw[j].J;
    const Interval& b = raw[j + 1].J;
    if (a.hi != b.lo)
      fault("R1", {j, j + 1}, "gap or overlap between " + a.str() + " and " + b.str());
    else if (a.hi_closed == b.lo_closed)
      fault("R1", {j, j + 1},
            "boundary " + format_real(a.hi) + " must belong to exactly one of " + a.str() + " and " + b.str());
  }

  std::vector<std::string> notes;
  for (std::size_t j = 0; j + 1 < n; ++j) {
    const Kind lo = raw[j].kind;
    const Kind hi = raw[j + 1].kind;
    // R2: ⊕ directly below ⊖.
    if (lo == Kind::plus && hi == Kind::minus)
      fault("R2", {j, j + 1}, "⊕ directly below ⊖ at " + format_real(raw[j].J.hi) + " needs a ⊙ between them");
    if (lo == Kind::minus && hi == Kind::plus)
      notes.push_back("⊖|⊕ boundary at " + format_real(raw[j].J.hi) + " without a separating ⊙");
    // R3: ⊙|⊙ is not canonical.
    if (opts.require_canonical && lo == Kind::constant && hi == Kind::constant)
      fault("R3", {j, j + 1}, "adjacent ⊙ domains must be merged in canonical form");
  }

  for (std::size_t j = 0; j < n; ++j) {
    const Domain& d = raw[j];
    // R4: closed monotone end facing a neighbor.
    if (d.kind == Kind::plus && d.J.hi_closed && j + 1 < n)
      fault("R4", {j, j + 1}, detail::domain_label(j, d) + " is right-closed below another domain");
    if (d.kind == Kind::minus && d.J.lo_closed && j > 0)
      fault("R4", {j - 1, j}, detail::domain_label(j, d) + " is left-closed above another domain");

    // R8: kind/path/anchor consistency and surjectivity.
    if (!d.is_monotone()) {
      if (d.path) fault("R8", {j}, detail::domain_label(j, d) + " is constant but has a path");
      if (d.anchor) fault("R8", {j}, detail::domain_label(j, d) + " is constant but has an anchor");
      continue;
    }
    if (!d.path) {
      fault("R8", {j}, detail::domain_label(j, d) + " needs a generating path");
      continue;
    }
    const GeneratingPath& p = *d.path;
    if (p.increasing() != (d.kind == Kind::plus))
      fault("R8", {j}, detail::domain_label(j, d) + " path direction is " + to_string(p.direction()));
    const Interval& r = p.range();
    if (!detail::near(r.lo, d.J.lo, opts.tol) || !detail::near(r.hi, d.J.hi, opts.tol) ||
        r.lo_closed != d.J.lo_closed || r.hi_closed != d.J.hi_closed)
      fault("R8", {j}, detail::domain_label(j, d) + " path maps onto " + r.str() + ", not onto J");
    if (d.anchor) {
      const double a = *d.anchor;
      if (!d.J.contains(a))
        fault("R8", {j}, detail::domain_label(j, d) + " anchor " + format_real(a) + " is outside J");
      else if (!p.domain().contains(0.0) || !detail::near(p.value(0.0), a, opts.tol))
        fault("R8", {j}, detail::domain_label(j, d) + " path does not pass through anchor " + format_real(a) + " at s = 0");
    }

    // R7: admissible shapes of I (never right-closed).
    const Interval& I = p.domain();
    if (I.hi_closed) fault("R7", {j}, detail::domain_label(j, d) + " has right-closed I = " + I.str());

    // R5: monotone neighbors of the same kind must not absorb into each other.
    if (d.kind == Kind::plus && j + 1 < n && raw[j + 1].kind == Kind::plus && std::isfinite(I.hi))
      fault("R5", {j, j + 1}, detail::domain_label(j, d) + " lies below a ⊕ domain but I = " + I.str() + " is bounded");
    if (d.kind == Kind::minus && j > 0 && raw[j - 1].kind == Kind::minus && std::isfinite(I.hi))
      fault("R5", {j - 1, j}, detail::domain_label(j, d) + " lies above a ⊖ domain but I = " + I.str() + " is bounded");

    // R6: no killing at the extremes.
    if (d.kind == Kind::plus && j + 1 == n && std::isfinite(I.hi))
      fault("R6", {j}, "top ⊕ domain reaches +inf in finite time, I = " + I.str());
    if (d.kind == Kind::minus && j == 0 && std::isfinite(I.hi))
      fault("R6", {j}, "bottom ⊖ domain reaches -inf in finite time, I = " + I.str());
  }

  if (result.faults.empty()) result.structure = Structure(std::move(raw), opts.require_canonical, std::move(notes));
  return result;
}

/// Like validate_structure but throws StructuralIntegrityError listing the faults.
inline Structure make_structure(std::vector<Domain> raw, const ValidateOptions& opts = {}) {
  ValidationResult r = validate_structure(std::move(raw), opts);
  if (!r.ok()) {
    std::string msg = "invalid structure:";
    for (const ValidationFault& f : r.faults) msg += " [" + f.rule_id + "] " + f.message + ";";
    throw StructuralIntegrityError(msg);
  }
  return std::move(*r.structure);
}

/// The unique domain containing x.
inline Location locate_domain(const Structure& s, double x) {
  if (std::isnan(x)) throw DomainError("locate_domain: x is NaN");
  const auto& d = s.domains();
  std::size_t lo = 0, hi = d.size() - 1;
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    const Interval& J = d[mid].J;
    const bool above = x > J.hi || (x == J.hi && !J.hi_closed);
    if (above) lo = mid + 1;
    else hi = mid;
  }
  const Interval& J = d[lo].J;
  return {lo, std::isfinite(J.lo) && x == J.lo, std::isfinite(J.hi) && x == J.hi};
}

namespace detail {

inline double canonical_anchor(const Interval& J) {
  if (J.bounded()) return J.lo + 0.5 * (J.hi - J.lo);
  if (std::isfinite(J.hi)) return J.hi - 1.0;
  if (std::isfinite(J.lo)) return J.lo + 1.0;
  return 0.0;
}

}  // namespace detail

/// Unique representative: merged ⊙ runs, anchors at the rule's reference
/// points and paths re-parameterized so that Φ(0) is the anchor.
inline Structure canonicalize(const Structure& s) {
  std::vector<Domain> out;
  for (const Domain& d : s.domains()) {
    if (d.kind == Kind::constant && !out.empty() && out.back().kind == Kind::constant) {
      out.back().J.hi = d.J.hi;
      out.back().J.hi_closed = d.J.hi_closed;
      continue;
    }
    out.push_back(d);
  }
  for (Domain& d : out) {
    if (!d.is_monotone()) continue;
    const double a = detail::canonical_anchor(d.J);
    const GeneratingPath& p = *d.path;
    const bool already = p.domain().contains(0.0) && std::abs(p.value(0.0) - a) <= 1e-12 * (1.0 + std::abs(a));
    if (!already) d.path = p.shifted(detail::inverse_unchecked(p, a));
    d.anchor = a;
  }
  ValidateOptions opts;
  opts.require_canonical = true;
  return make_structure(std::move(out), opts);
}

}  // namespace dethunt
