#pragma once

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "dethunt/error.hpp"
#include "dethunt/format.hpp"
#include "dethunt/interval.hpp"
#include "dethunt/path.hpp"
#include "dethunt/structure.hpp"

// huntspec v1
//
//   huntspec v1
//   minus (-inf,0) path=linear(-1,0) I=(0,inf)
//   const [0,0]
//   plus (0,inf) path=linear(1,0) I=(0,inf)
//
// One domain per line, bottom domain first. Path specs:
//   linear(slope,intercept)   cantor(depth)   polyline(file)   table(file)
//   cubic   rise_sq   fall_sq   affine_cantor(depth,a,b,c,d)
// I= is the parameter interval of the path as used on this line; when
// anchor= is present the path is re-parameterized so that Φ(0) = anchor.

namespace dethunt {

enum class Severity { error, warning };

struct ParseDiagnostic {
  int line = 0;
  int column = 0;
  std::string message;
  Severity severity = Severity::error;

  std::string str() const {
    return std::to_string(line) + ":" + std::to_string(column) + ": " +
           (severity == Severity::error ? "error: " : "warning: ") + message;
  }
};

struct PathSpec {
  std::string name;
  std::vector<double> args;
  std::string file;  // polyline / table only
  int column = 0;
};

struct DomainLine {
  int line = 0;
  Kind kind = Kind::constant;
  Interval J;
  std::optional<PathSpec> path;
  std::optional<Interval> I;
  std::optional<double> anchor;
};

struct SpecDocument {
  int version = 1;
  std::vector<DomainLine> domains;
};

struct ParseResult {
  std::optional<SpecDocument> document;
  std::vector<ParseDiagnostic> diagnostics;

  bool ok() const { return document.has_value(); }
};

namespace detail {

class LineCursor {
 public:
  LineCursor(std::string_view text, int line) : text_(text), line_(line) {}

  bool at_end() const { return pos_ >= text_.size(); }
  int column() const { return static_cast<int>(pos_) + 1; }
  char peek() const { return at_end() ? '\0' : text_[pos_]; }

  static bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\f' || c == '\v'; }

  bool skip_ws() {
    const std::size_t start = pos_;
    while (!at_end() && is_space(text_[pos_])) ++pos_;
    return pos_ > start;
  }

  bool consume(std::string_view lit) {
    if (text_.substr(pos_, lit.size()) != lit) return false;
    pos_ += lit.size();
    return true;
  }

  std::string_view word() {
    const std::size_t start = pos_;
    while (!at_end() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) ++pos_;
    return text_.substr(start, pos_ - start);
  }

  // Everything up to (not including) the first of `stops`.
  std::string_view until(std::string_view stops) {
    const std::size_t start = pos_;
    while (!at_end() && stops.find(text_[pos_]) == std::string_view::npos) ++pos_;
    return text_.substr(start, pos_ - start);
  }

  ParseDiagnostic error(std::string msg, int col = 0) const {
    return {line_, col ? col : column(), std::move(msg), Severity::error};
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
  int line_;
};

inline std::optional<double> parse_real_token(std::string_view tok) {
  while (!tok.empty() && LineCursor::is_space(tok.front())) tok.remove_prefix(1);
  while (!tok.empty() && LineCursor::is_space(tok.back())) tok.remove_suffix(1);
  if (tok == "inf" || tok == "+inf") return kInf;
  if (tok == "-inf") return -kInf;
  if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
  if (tok.empty()) return std::nullopt;
  double v = 0.0;
  auto [end, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc{} || end != tok.data() + tok.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

inline std::optional<Interval> parse_interval(LineCursor& c, std::vector<ParseDiagnostic>& diags) {
  const int start = c.column();
  const char open = c.peek();
  if (open != '[' && open != '(') {
    diags.push_back(c.error("expected '[' or '(' to open an interval"));
    return std::nullopt;
  }
  c.consume(std::string_view(&open, 1));
  const int lo_col = c.column();
  const std::string_view lo_tok = c.until(",])[(");
  if (!c.consume(",")) {
    diags.push_back(c.error("expected ',' between interval endpoints"));
    return std::nullopt;
  }
  const int hi_col = c.column();
  const std::string_view hi_tok = c.until("])[(,");
  const char close = c.peek();
  if (close != ']' && close != ')') {
    diags.push_back(c.error("expected ']' or ')' to close the interval"));
    return std::nullopt;
  }
  c.consume(std::string_view(&close, 1));
  const auto lo = parse_real_token(lo_tok);
  const auto hi = parse_real_token(hi_tok);
  if (!lo) diags.push_back(c.error("malformed real '" + std::string(lo_tok) + "'", lo_col));
  if (!hi) diags.push_back(c.error("malformed real '" + std::string(hi_tok) + "'", hi_col));
  if (!lo || !hi) return std::nullopt;
  Interval iv{*lo, *hi, open == '[', close == ']'};
  if (!iv.valid()) {
    diags.push_back(c.error("malformed interval " + iv.str() + ": need lo < hi, a closed point, and open infinite ends", start));
    return std::nullopt;
  }
  return iv;
}

inline const std::map<std::string, std::pair<std::size_t, std::size_t>>& pathspec_arity() {
  // name -> (min args, max args); file-based specs take one file argument.
  static const std::map<std::string, std::pair<std::size_t, std::size_t>> table{
      {"linear", {2, 2}}, {"cantor", {0, 1}}, {"affine_cantor", {5, 5}},
      {"cubic", {0, 0}},  {"rise_sq", {0, 0}}, {"fall_sq", {0, 0}},
  };
  return table;
}

inline std::optional<PathSpec> parse_pathspec(LineCursor& c, std::vector<ParseDiagnostic>& diags) {
  PathSpec ps;
  ps.column = c.column();
  ps.name = std::string(c.word());
  if (ps.name.empty()) {
    diags.push_back(c.error("expected a path specification after 'path='"));
    return std::nullopt;
  }
  if (ps.name == "polyline" || ps.name == "table") {
    if (!c.consume("(")) {
      diags.push_back(c.error("expected '(' after " + ps.name));
      return std::nullopt;
    }
    ps.file = std::string(c.until(")"));
    if (!c.consume(")")) {
      diags.push_back(c.error("expected ')' to close " + ps.name + "("));
      return std::nullopt;
    }
    if (ps.file.empty()) {
      diags.push_back(c.error(ps.name + " needs a node file", ps.column));
      return std::nullopt;
    }
    return ps;
  }
  const auto& arity = pathspec_arity();
  const auto it = arity.find(ps.name);
  if (it == arity.end()) {
    diags.push_back(c.error("unknown path specification '" + ps.name + "'", ps.column));
    return std::nullopt;
  }
  if (c.consume("(")) {
    while (true) {
      const int col = c.column();
      const std::string_view tok = c.until(",)");
      const auto v = parse_real_token(tok);
      if (!v || std::isinf(*v)) {
        diags.push_back(c.error("malformed argument '" + std::string(tok) + "'", col));
        return std::nullopt;
      }
      ps.args.push_back(*v);
      if (c.consume(",")) continue;
      if (c.consume(")")) break;
      diags.push_back(c.error("expected ',' or ')' in argument list"));
      return std::nullopt;
    }
  }
  if (ps.args.size() < it->second.first || ps.args.size() > it->second.second) {
    diags.push_back(c.error(ps.name + " takes " + std::to_string(it->second.first) +
                                (it->second.first == it->second.second ? "" : "-" + std::to_string(it->second.second)) +
                                " arguments, got " + std::to_string(ps.args.size()),
                            ps.column));
    return std::nullopt;
  }
  return ps;
}

inline std::optional<DomainLine> parse_domain_line(std::string_view text, int line_no,
                                                   std::vector<ParseDiagnostic>& diags) {
  LineCursor c(text, line_no);
  c.skip_ws();
  DomainLine dl;
  dl.line = line_no;
  const int kind_col = c.column();
  const std::string_view kind = c.word();
  if (kind == "plus") dl.kind = Kind::plus;
  else if (kind == "minus") dl.kind = Kind::minus;
  else if (kind == "const") dl.kind = Kind::constant;
  else {
    diags.push_back(c.error("expected 'plus', 'minus' or 'const', found '" + std::string(kind.empty() ? text.substr(0, 1) : kind) + "'", kind_col));
    return std::nullopt;
  }
  if (!c.skip_ws()) {
    diags.push_back(c.error("expected whitespace after the domain kind"));
    return std::nullopt;
  }
  auto J = parse_interval(c, diags);
  if (!J) return std::nullopt;
  dl.J = *J;
  const bool had_ws = c.skip_ws();
  if (c.at_end()) {
    if (dl.kind != Kind::constant) {
      diags.push_back(c.error(std::string(to_string(dl.kind)) + " domain needs path= and I="));
      return std::nullopt;
    }
    return dl;
  }
  if (!had_ws) {
    diags.push_back(c.error("expected whitespace after the interval"));
    return std::nullopt;
  }
  if (dl.kind == Kind::constant) {
    diags.push_back(c.error("const domain takes no path"));
    return std::nullopt;
  }
  if (!c.consume("path=")) {
    diags.push_back(c.error("expected 'path='"));
    return std::nullopt;
  }
  dl.path = parse_pathspec(c, diags);
  if (!dl.path) return std::nullopt;
  if (!c.skip_ws() || !c.consume("I=")) {
    diags.push_back(c.error("expected ' I=' after the path"));
    return std::nullopt;
  }
  dl.I = parse_interval(c, diags);
  if (!dl.I) return std::nullopt;
  const bool ws = c.skip_ws();
  if (c.at_end()) return dl;
  if (!ws || !c.consume("anchor=")) {
    diags.push_back(c.error("expected ' anchor=' or end of line"));
    return std::nullopt;
  }
  const int col = c.column();
  const std::string_view tok = c.until(" \t\r\f\v");
  const auto a = parse_real_token(tok);
  if (!a || std::isinf(*a)) {
    diags.push_back(c.error("malformed anchor '" + std::string(tok) + "'", col));
    return std::nullopt;
  }
  dl.anchor = *a;
  c.skip_ws();
  if (!c.at_end()) {
    diags.push_back(c.error("unexpected trailing text"));
    return std::nullopt;
  }
  return dl;
}

}  // namespace detail

/// Never throws on malformed input; all problems come back as diagnostics.
inline ParseResult parse_spec(std::string_view text) {
  ParseResult out;
  SpecDocument doc;
  bool header_seen = false;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    std::size_t first = 0;
    while (first < line.size() && detail::LineCursor::is_space(line[first])) ++first;
    if (first == line.size()) {
      if (nl == text.size()) break;
      continue;
    }
    if (!header_seen) {
      std::string_view h = line.substr(first);
      while (!h.empty() && detail::LineCursor::is_space(h.back())) h.remove_suffix(1);
      if (h == "huntspec v1") header_seen = true;
      else if (h.substr(0, 10) == "huntspec v")
        out.diagnostics.push_back({line_no, static_cast<int>(first) + 1, "unsupported format version '" + std::string(h) + "'", Severity::error});
      else
        out.diagnostics.push_back({line_no, static_cast<int>(first) + 1, "missing header 'huntspec v1'", Severity::error});
      if (!header_seen) return out;
      continue;
    }
    if (auto dl = detail::parse_domain_line(line, line_no, out.diagnostics)) doc.domains.push_back(std::move(*dl));
    if (nl == text.size()) break;
  }
  if (!header_seen) {
    out.diagnostics.push_back({1, 1, "missing header 'huntspec v1'", Severity::error});
    return out;
  }
  if (doc.domains.empty() && out.diagnostics.empty())
    out.diagnostics.push_back({line_no, 1, "document has no domain lines", Severity::error});
  for (const ParseDiagnostic& d : out.diagnostics)
    if (d.severity == Severity::error) return out;
  out.document = std::move(doc);
  return out;
}

// ---------------------------------------------------------------------------
// Building structures

/// Maps a node-file reference to its text, or nullopt if unreadable.
using FileResolver = std::function<std::optional<std::string>(const std::string&)>;

inline FileResolver directory_resolver(std::string base_dir) {
  return [base = std::move(base_dir)](const std::string& name) -> std::optional<std::string> {
    const std::string path = (name.empty() || name.front() == '/' || base.empty()) ? name : base + "/" + name;
    std::ifstream in(path);
    if (!in) return std::nullopt;
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
  };
}

inline FileResolver map_resolver(std::map<std::string, std::string> files) {
  return [files = std::move(files)](const std::string& name) -> std::optional<std::string> {
    const auto it = files.find(name);
    if (it == files.end()) return std::nullopt;
    return it->second;
  };
}

struct BuildResult {
  std::optional<Structure> structure;
  std::vector<ParseDiagnostic> diagnostics;
  std::vector<ValidationFault> faults;

  bool ok() const { return structure.has_value(); }
};

namespace detail {

inline PathRule rule_from_spec(const PathSpec& ps, const FileResolver& resolve) {
  if (ps.name == "linear") return rules::Linear{ps.args[0], ps.args[1]};
  if (ps.name == "cantor" || ps.name == "affine_cantor") {
    const double depth = ps.args.empty() ? kDefaultCantorDepth : ps.args[0];
    if (depth != std::floor(depth) || depth < 1 || depth > 1000) throw DomainError("Cantor depth must be a positive integer");
    if (ps.name == "cantor") return rules::Cantor{static_cast<int>(depth)};
    if (ps.args[1] == 0.0 || ps.args[2] == 0.0) throw DomainError("affine_cantor scales must be nonzero");
    return rules::AffineCantor{static_cast<int>(depth), ps.args[1], ps.args[2], ps.args[3], ps.args[4]};
  }
  if (ps.name == "polyline" || ps.name == "table") {
    const std::optional<std::string> text = resolve ? resolve(ps.file) : std::nullopt;
    if (!text) throw FormatError("cannot read node file '" + ps.file + "'");
    std::vector<Node> nodes = parse_nodes(*text);
    if (ps.name == "polyline") return rules::Polyline{std::move(nodes)};
    return rules::Table{std::move(nodes), {}};
  }
  return rules::Builtin{ps.name};
}

}  // namespace detail

inline BuildResult build_structure(const SpecDocument& doc, const FileResolver& resolve = {},
                                   const ValidateOptions& opts = {}) {
  BuildResult out;
  std::vector<Domain> domains;
  for (const DomainLine& dl : doc.domains) {
    if (dl.kind == Kind::constant) {
      domains.push_back(Domain::constant(dl.J));
      continue;
    }
    try {
      PathRule rule = detail::rule_from_spec(*dl.path, resolve);
      double shift = 0.0;
      if (dl.anchor) {
        const GeneratingPath base(rule, detail::natural_domain(rule));
        if (!base.range().contains(*dl.anchor)) throw RangeError("anchor " + format_real(*dl.anchor) + " outside the path's range " + base.range().str());
        shift = detail::inverse_unchecked(base, *dl.anchor);
      }
      GeneratingPath path(std::move(rule), *dl.I, shift);
      Domain d{dl.J, dl.kind, std::move(path), dl.anchor};
      domains.push_back(std::move(d));
    } catch (const HuntError& e) {
      out.diagnostics.push_back({dl.line, dl.path ? dl.path->column : 1, e.what(), Severity::error});
    }
  }
  if (!out.diagnostics.empty()) return out;
  ValidationResult vr = validate_structure(std::move(domains), opts);
  out.faults = std::move(vr.faults);
  for (const ValidationFault& f : out.faults) {
    const int line = f.domains.empty() ? 1 : doc.domains[f.domains.front()].line;
    out.diagnostics.push_back({line, 1, "[" + f.rule_id + "] " + f.message, Severity::error});
  }
  out.structure = std::move(vr.structure);
  return out;
}

/// parse_spec followed by build_structure.
inline BuildResult load_spec(std::string_view text, const FileResolver& resolve = {}) {
  ParseResult pr = parse_spec(text);
  if (!pr.ok()) return {std::nullopt, std::move(pr.diagnostics), {}};
  BuildResult br = build_structure(*pr.document, resolve);
  br.diagnostics.insert(br.diagnostics.begin(), pr.diagnostics.begin(), pr.diagnostics.end());
  return br;
}

// ---------------------------------------------------------------------------
// Emitting

struct EmittedSpec {
  std::string text;
  std::map<std::string, std::string> files;  // node files referenced by polyline/table
};

namespace detail {

inline std::string pathspec_text(const PathRule& rule, std::size_t j, std::map<std::string, std::string>& files) {
  return std::visit(
      [&](const auto& r) -> std::string {
        using R = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<R, rules::Linear>) {
          return "linear(" + format_real(r.slope) + "," + format_real(r.intercept) + ")";
        } else if constexpr (std::is_same_v<R, rules::Polyline> || std::is_same_v<R, rules::Table>) {
          constexpr bool poly = std::is_same_v<R, rules::Polyline>;
          const std::string name = "domain" + std::to_string(j) + (poly ? ".polyline" : ".table");
          files[name] = emit_nodes(r.nodes);
          return std::string(poly ? "polyline(" : "table(") + name + ")";
        } else if constexpr (std::is_same_v<R, rules::Cantor>) {
          return "cantor(" + std::to_string(r.depth) + ")";
        } else if constexpr (std::is_same_v<R, rules::AffineCantor>) {
          return "affine_cantor(" + std::to_string(r.depth) + "," + format_real(r.outer_scale) + "," +
                 format_real(r.inner_scale) + "," + format_real(r.inner_shift) + "," + format_real(r.outer_shift) + ")";
        } else if constexpr (std::is_same_v<R, rules::Builtin>) {
          return r.name;
        } else {
          throw EmitError("domain " + std::to_string(j) + " uses the callable path '" + r.name + "', which has no text form");
        }
      },
      rule);
}

}  // namespace detail

/// Text form of canonicalize(s). Throws EmitError for callable paths.
inline EmittedSpec emit_spec(const Structure& s) {
  for (std::size_t j = 0; j < s.size(); ++j)
    if (s[j].path && !s[j].path->serializable())
      throw EmitError("domain " + std::to_string(j) + " (" + s[j].J.str() + ") holds a callable path, which has no text form");
  const Structure c = canonicalize(s);
  EmittedSpec out;
  out.text = "huntspec v1\n";
  for (std::size_t j = 0; j < c.size(); ++j) {
    const Domain& d = c[j];
    out.text += std::string(to_string(d.kind)) + " " + d.J.str();
    if (d.is_monotone()) {
      out.text += " path=" + detail::pathspec_text(d.path->rule(), j, out.files) + " I=" + d.path->domain().str();
      if (d.anchor) out.text += " anchor=" + format_real(*d.anchor);
    }
    out.text += "\n";
  }
  return out;
}

}  // namespace dethunt
