#pragma once

#include <algorithm>
#include <string>
#include <vector>

namespace dethunt {

enum class Verdict { holds, fails, inconclusive };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::holds: return "holds";
    case Verdict::fails: return "fails";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

/// A concrete input at which a property was observed.
struct Witness {
  std::vector<double> inputs;
  double observed = 0.0;
  double expected = 0.0;
  std::string note;
};

/// Outcome of one classification or numerical check. A failing report always
/// carries at least one witness.
struct PropertyReport {
  std::string property_id;
  Verdict verdict = Verdict::inconclusive;
  double residual = 0.0;
  std::vector<Witness> witnesses;
  std::vector<std::string> notes;

  bool holds() const { return verdict == Verdict::holds; }
  bool fails() const { return verdict == Verdict::fails; }
};

/// Orders witnesses by their inputs so reports do not depend on sweep order.
inline void sort_witnesses(PropertyReport& r) {
  std::stable_sort(r.witnesses.begin(), r.witnesses.end(),
                   [](const Witness& a, const Witness& b) { return a.inputs < b.inputs; });
}

/// Logical conjunction of sub-reports: fails if any fails, else inconclusive
/// if any is inconclusive, else holds. Witnesses and notes are concatenated.
inline PropertyReport conjunction(std::string id, const std::vector<PropertyReport>& parts) {
  PropertyReport out;
  out.property_id = std::move(id);
  out.verdict = Verdict::holds;
  for (const PropertyReport& p : parts) {
    if (p.verdict == Verdict::fails) out.verdict = Verdict::fails;
    else if (p.verdict == Verdict::inconclusive && out.verdict == Verdict::holds)
      out.verdict = Verdict::inconclusive;
    out.residual = std::max(out.residual, p.residual);
    for (Witness w : p.witnesses) {
      if (w.note.empty()) w.note = p.property_id;
      out.witnesses.push_back(std::move(w));
    }
    for (const std::string& n : p.notes) out.notes.push_back(p.property_id + ": " + n);
  }
  return out;
}

}  // namespace dethunt
