#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "dethunt/infer.hpp"
#include "dethunt/raw_families.hpp"
#include "dethunt/structure.hpp"

using namespace dethunt;

namespace {

std::set<std::string> rule_ids(const ValidationResult& r) {
  std::set<std::string> ids;
  for (const auto& f : r.faults) ids.insert(f.rule_id);
  return ids;
}

const Interval kPos = Interval::open(0.0, kInf);

std::vector<Domain> space_drift_domains() {
  return {Domain::monotone(Interval::open(-kInf, 0.0), GeneratingPath::linear(-1.0, 0.0, kPos)),
          Domain::constant(Interval::point(0.0)),
          Domain::monotone(Interval::open(0.0, kInf), GeneratingPath::linear(1.0, 0.0, kPos))};
}

Structure knick() {
  return make_structure({Domain::monotone(Interval::real_line(), GeneratingPath::polyline({{-1, -0.5}, {0, 0}, {1, 1}}))});
}

// Hand evaluation of the closed-monotone-end rule from kinds and closure
// flags alone.
bool r4_oracle(const std::vector<Domain>& d) {
  for (std::size_t j = 0; j < d.size(); ++j) {
    if (d[j].kind == Kind::plus && d[j].J.hi_closed && j + 1 < d.size()) return true;
    if (d[j].kind == Kind::minus && d[j].J.lo_closed && j > 0) return true;
  }
  return false;
}

}  // namespace

TEST(Validate, PureConstant) {
  const auto r = validate_structure({Domain::constant(Interval::real_line())});
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(r.structure->signature(), "⊙");
}

TEST(Validate, SpaceDependentDrift) {
  const auto r = validate_structure(space_drift_domains());
  ASSERT_TRUE(r.ok()) << r.faults.front().message;
  EXPECT_EQ(r.structure->signature(), "⊖|⊙|⊕");
}

TEST(Validate, RightClosedPlusBelowPlus) {
  std::vector<Domain> d{
      Domain::monotone(Interval::open_closed(-kInf, 0.0), GeneratingPath::linear(1.0, 0.0, Interval::open(-kInf, 0.0))),
      Domain::monotone(Interval::open(0.0, kInf), GeneratingPath::linear(1.0, 0.0, kPos))};
  ASSERT_TRUE(r4_oracle(d));
  const auto r = validate_structure(d);
  EXPECT_FALSE(r.ok());
  const auto ids = rule_ids(r);
  EXPECT_TRUE(ids.count("R4"));
  EXPECT_TRUE(ids.count("R5"));
}

TEST(Validate, PartitionFaults) {
  auto gap = validate_structure({Domain::constant(Interval::open(-kInf, 0.0)), Domain::constant(Interval::open(0.0, kInf))});
  EXPECT_TRUE(rule_ids(gap).count("R1"));
  auto both = validate_structure({Domain::constant(Interval::open_closed(-kInf, 0.0)), Domain::constant(Interval::closed_open(0.0, kInf))});
  EXPECT_TRUE(rule_ids(both).count("R1"));
  auto overlap = validate_structure({Domain::constant(Interval::open_closed(-kInf, 1.0)), Domain::constant(Interval::open(0.0, kInf))});
  EXPECT_TRUE(rule_ids(overlap).count("R1"));
  auto short_top = validate_structure({Domain::constant(Interval::open(-kInf, 5.0))});
  EXPECT_TRUE(rule_ids(short_top).count("R1"));
  EXPECT_TRUE(rule_ids(validate_structure({})).count("R1"));
}

TEST(Validate, DomainCountLimit) {
  std::vector<Domain> d;
  d.push_back(Domain::constant(Interval::open_closed(-kInf, 0.0)));
  for (int i = 0; i < 20; ++i) d.push_back(Domain::constant(Interval{double(i), double(i + 1), false, true}));
  d.push_back(Domain::constant(Interval::open(20.0, kInf)));
  ValidateOptions opts;
  opts.max_domains = 10;
  EXPECT_TRUE(rule_ids(validate_structure(d, opts)).count("R1"));
  EXPECT_TRUE(validate_structure(d).ok());
}

TEST(Validate, PlusDirectlyBelowMinus) {
  const auto r = validate_structure({
      Domain::monotone(Interval::open(-kInf, 0.0), GeneratingPath::linear(1.0, -1.0, Interval::open(-kInf, 1.0))),
      Domain::monotone(Interval::closed_open(0.0, kInf), GeneratingPath::linear(-1.0, 0.0, Interval::open(-kInf, 0.0)))});
  EXPECT_TRUE(rule_ids(r).count("R2"));
}

TEST(Validate, MinusBelowPlusAdmittedWithNote) {
  const auto r = validate_structure({
      Domain::monotone(Interval::open_closed(-kInf, 0.0), GeneratingPath::linear(-1.0, 0.0, Interval::closed_open(0.0, kInf))),
      Domain::monotone(Interval::open(0.0, kInf), GeneratingPath::linear(1.0, 0.0, kPos))});
  ASSERT_TRUE(r.ok());
  ASSERT_EQ(r.structure->notes().size(), 1u);
  EXPECT_NE(r.structure->notes()[0].find("⊖|⊕"), std::string::npos);
}

TEST(Validate, AdjacentConstantsOnlyOutsideCanonicalForm) {
  std::vector<Domain> d{Domain::constant(Interval::open_closed(-kInf, 1.0)), Domain::constant(Interval::open(1.0, kInf))};
  EXPECT_TRUE(validate_structure(d).ok());
  ValidateOptions opts;
  opts.require_canonical = true;
  EXPECT_TRUE(rule_ids(validate_structure(d, opts)).count("R3"));
}

TEST(Validate, LeftClosedMinusAboveAnotherDomain) {
  const auto r = validate_structure({
      Domain::constant(Interval::open(-kInf, 0.0)),
      Domain::monotone(Interval::closed_open(0.0, kInf), GeneratingPath::linear(-1.0, 0.0, Interval::open(-kInf, 0.0)))});
  EXPECT_TRUE(rule_ids(r).count("R4"));
}

TEST(Validate, MinusAboveMinusNeedsUnboundedI) {
  const auto r = validate_structure({
      Domain::monotone(Interval::open_closed(-kInf, 0.0), GeneratingPath::linear(-1.0, 0.0, Interval::closed_open(0.0, kInf))),
      Domain::monotone(Interval::open(0.0, kInf), GeneratingPath::linear(-1.0, 0.0, Interval::open(-kInf, 0.0)))});
  EXPECT_TRUE(rule_ids(r).count("R5"));
  EXPECT_FALSE(rule_ids(r).count("R4"));
}

TEST(Validate, AbsorptionIntoConstantAllowed) {
  // ⊕ on (-inf, 0) reaches 0 in finite time and rests in [0, inf).
  const auto r = validate_structure({
      Domain::monotone(Interval::open(-kInf, 0.0), GeneratingPath::linear(1.0, 0.0, Interval::open(-kInf, 0.0))),
      Domain::constant(Interval::closed_open(0.0, kInf))});
  EXPECT_TRUE(r.ok());
}

TEST(Validate, NoKilling) {
  const auto top = validate_structure({
      Domain::constant(Interval::open_closed(-kInf, 0.0)),
      Domain::monotone(Interval::open(0.0, kInf), GeneratingPath::callable([](double s) { return std::tan(s); },
                                                                            Interval::open(0.0, M_PI / 2), Direction::increasing,
                                                                            Interval::real_line(), "tan"))});
  EXPECT_TRUE(rule_ids(top).count("R6"));
}

TEST(Validate, RightClosedParameterInterval) {
  const auto r = validate_structure({
      Domain::monotone(Interval::open_closed(-kInf, 0.0), GeneratingPath::linear(1.0, 0.0, Interval::open_closed(-kInf, 0.0))),
      Domain::constant(Interval::open(0.0, kInf))});
  EXPECT_TRUE(rule_ids(r).count("R7"));
}

TEST(Validate, SurjectivityDirectionAnchor) {
  auto wrong_range = validate_structure({Domain::monotone(Interval::real_line(), GeneratingPath::linear(1.0, 0.0, kPos))});
  EXPECT_TRUE(rule_ids(wrong_range).count("R8"));
  Domain flipped = Domain::monotone(Interval::real_line(), GeneratingPath::linear(-1.0, 0.0));
  flipped.kind = Kind::plus;
  EXPECT_TRUE(rule_ids(validate_structure({flipped})).count("R8"));
  auto bad_anchor = validate_structure({Domain::monotone(Interval::real_line(), GeneratingPath::linear(1.0, 0.0), 3.0)});
  EXPECT_TRUE(rule_ids(bad_anchor).count("R8"));
  Domain with_path = Domain::constant(Interval::real_line());
  with_path.path = GeneratingPath::linear(1.0, 0.0);
  EXPECT_TRUE(rule_ids(validate_structure({with_path})).count("R8"));
}

TEST(Validate, ReportsAllFaults) {
  const auto r = validate_structure({
      Domain::monotone(Interval::open(-kInf, 0.0), GeneratingPath::linear(1.0, -1.0, Interval::open(-kInf, 1.0))),
      Domain::monotone(Interval::closed(0.0, 1.0), GeneratingPath::linear(-1.0, 1.0, Interval::open(0.0, 1.0))),
      Domain::constant(Interval::open(2.0, kInf))});
  const auto ids = rule_ids(r);
  EXPECT_TRUE(ids.count("R1"));
  EXPECT_TRUE(ids.count("R2"));
  EXPECT_TRUE(ids.count("R8"));
}

TEST(Canonicalize, MergesConstants) {
  const auto s = make_structure({Domain::constant(Interval::open(-kInf, 0.0)), Domain::constant(Interval::closed(0.0, 1.0)),
                                 Domain::constant(Interval::open_closed(1.0, 2.0)), Domain::constant(Interval::open(2.0, kInf))});
  const auto c = canonicalize(s);
  ASSERT_EQ(c.size(), 1u);
  EXPECT_EQ(c[0].J, Interval::real_line());
  EXPECT_TRUE(c.canonical());
}

TEST(Canonicalize, MergesBoundedConstants) {
  const auto s = make_structure({
      Domain::monotone(Interval::open(-kInf, 0.0), GeneratingPath::linear(1.0, 0.0, Interval::open(-kInf, 0.0))),
      Domain::constant(Interval::closed(0.0, 1.0)), Domain::constant(Interval::open_closed(1.0, 2.0)),
      Domain::monotone(Interval::open(2.0, kInf), GeneratingPath::linear(1.0, 2.0, kPos))});
  const auto c = canonicalize(s);
  ASSERT_EQ(c.size(), 3u);
  EXPECT_EQ(c[1].J, Interval::closed(0.0, 2.0));
}

TEST(Canonicalize, AnchorsAndReparameterization) {
  const auto s = make_structure({
      Domain::monotone(Interval::open(-kInf, 0.0), GeneratingPath::linear(1.0, 0.0, Interval::open(-kInf, 0.0))),
      Domain::constant(Interval::closed_open(0.0, 2.0)),
      Domain::monotone(Interval::closed_open(2.0, 4.0), GeneratingPath::builtin("rise_sq", Interval::closed_open(1.0, std::sqrt(3.0)))),
      Domain::constant(Interval::closed_open(4.0, kInf))});
  const auto c = canonicalize(s);
  EXPECT_EQ(*c[0].anchor, -1.0);
  EXPECT_NEAR(c[0].path->value(0.0), -1.0, 1e-12);
  EXPECT_EQ(*c[2].anchor, 3.0);
  EXPECT_NEAR(c[2].path->value(0.0), 3.0, 1e-12);
  // Reparameterization keeps the range.
  EXPECT_NEAR(c[2].path->range().lo, 2.0, 1e-12);
  EXPECT_NEAR(c[2].path->range().hi, 4.0, 1e-12);
}

TEST(Canonicalize, HighestAndWholeLineAnchorsIdempotence) {
  const auto sd = canonicalize(make_structure(space_drift_domains()));
  EXPECT_EQ(*sd[0].anchor, -1.0);
  EXPECT_EQ(*sd[2].anchor, 1.0);
  const auto k = canonicalize(knick());
  EXPECT_EQ(*k[0].anchor, 0.0);
  const auto twice = canonicalize(sd);
  for (std::size_t j = 0; j < sd.size(); ++j) {
    EXPECT_EQ(twice[j].J, sd[j].J);
    EXPECT_EQ(twice[j].anchor, sd[j].anchor);
    if (sd[j].path) {
      EXPECT_EQ(twice[j].path->shift(), sd[j].path->shift());
    }
  }
  ValidateOptions opts;
  opts.require_canonical = true;
  EXPECT_TRUE(validate_structure(sd.domains(), opts).ok());
}

TEST(Locate, Examples) {
  const auto pure = make_structure({Domain::constant(Interval::real_line())});
  const auto l = locate_domain(pure, 17.0);
  EXPECT_EQ(l.index, 0u);
  EXPECT_FALSE(l.at_lower_boundary || l.at_upper_boundary);
  const auto sd = make_structure(space_drift_domains());
  const auto z = locate_domain(sd, 0.0);
  EXPECT_EQ(z.index, 1u);
  EXPECT_TRUE(z.at_lower_boundary && z.at_upper_boundary);
  EXPECT_EQ(locate_domain(knick(), -5.0).index, 0u);
}

TEST(Locate, ConsistentWithPartition) {
  const auto s = make_structure({
      Domain::monotone(Interval::open(-kInf, -1.0), GeneratingPath::linear(1.0, -1.0, Interval::open(-kInf, 0.0))),
      Domain::constant(Interval::closed(-1.0, 0.5)),
      Domain::monotone(Interval::open_closed(0.5, 1.0), GeneratingPath::linear(-1.0, 1.0, Interval::closed_open(0.0, 0.5))),
      Domain::constant(Interval::open(1.0, kInf))});
  for (int i = -400; i <= 400; ++i) {
    const double x = i / 128.0;
    const auto loc = locate_domain(s, x);
    EXPECT_TRUE(s[loc.index].J.contains(x));
    int owners = 0;
    for (const auto& d : s.domains()) owners += d.J.contains(x);
    EXPECT_EQ(owners, 1);
  }
  for (std::size_t j = 0; j + 1 < s.size(); ++j) EXPECT_NE(s[j].J.hi_closed, s[j + 1].J.lo_closed);
}

TEST(Infer, LinearLevyFamily) {
  auto fam = sample_family([](double x, double t) { return x + 2.0 * t; }, uniform_grid(-4, 4, 33), uniform_grid(0, 2, 65));
  const auto r = infer_structure(fam, 1e-9);
  ASSERT_TRUE(r.structure);
  EXPECT_TRUE(r.levy);
  EXPECT_NEAR(r.levy_slope, 2.0, 1e-9);
  EXPECT_EQ(r.structure->signature(), "⊕");
  EXPECT_TRUE(r.report.holds());
}

TEST(Infer, ConstantFamily) {
  auto fam = sample_family([](double x, double) { return x; }, uniform_grid(-4, 4, 33), uniform_grid(0, 2, 65));
  const auto r = infer_structure(fam, 1e-9);
  ASSERT_TRUE(r.structure);
  EXPECT_EQ(r.structure->signature(), "⊙");
}

TEST(Infer, KnickFamilyReproducesEvaluate) {
  const auto k = knick();
  // Closed-form trajectories: slope 1/2 below 0, slope 1 above.
  auto oracle = [](double x, double t) {
    if (x >= 0) return x + t;
    const double hit = -2.0 * x;
    return t < hit ? x + 0.5 * t : t - hit;
  };
  const double tol = 1e-3;
  auto fam = sample_family(oracle, uniform_grid(-4, 4, 65), uniform_grid(0, 2, 129));
  const auto r = infer_structure(fam, 1e-9);
  ASSERT_TRUE(r.structure) << (r.report.notes.empty() ? "" : r.report.notes.front());
  EXPECT_EQ(r.structure->signature(), "⊕");
  EXPECT_FALSE(r.levy);
  EXPECT_LE(r.report.residual, tol);
  for (double x : uniform_grid(-4, 4, 17))
    for (double t : {0.0, 0.3, 1.1, 2.0}) EXPECT_NEAR(evaluate(*r.structure, x, t), oracle(x, t), tol);
}

TEST(Infer, SpaceDriftFamilyGetsSingletonRest) {
  auto fam = sample_family([](double x, double t) { return x > 0 ? x + t : (x < 0 ? x - t : 0.0); },
                           uniform_grid(-4, 4, 65), uniform_grid(0, 2, 65));
  const auto r = infer_structure(fam, 1e-9);
  ASSERT_TRUE(r.structure);
  EXPECT_EQ(r.structure->signature(), "⊖|⊙|⊕");
  EXPECT_LE(r.report.residual, 1e-9);
}

TEST(Infer, RejectsZigZagWithWitness) {
  auto fam = sample_family(zigzag_family(), uniform_grid(-1, 1, 33), uniform_grid(0, 2, 257));
  const auto r = infer_structure(fam, 1e-9);
  EXPECT_FALSE(r.structure);
  EXPECT_TRUE(r.report.fails());
  ASSERT_FALSE(r.report.witnesses.empty());
  EXPECT_EQ(r.report.witnesses.front().inputs.size(), 4u);
}
