#include <gtest/gtest.h>

#include <cmath>

#include "dethunt/gallery.hpp"
#include "dethunt/process.hpp"
#include "dethunt/raw_families.hpp"

using namespace dethunt;

namespace {

Structure linear_plus() { return make_structure({Domain::monotone(Interval::real_line(), GeneratingPath::linear(1.0, 0.0))}); }

// ⊕ below 0 that is absorbed at 0 by the resting half line.
Structure absorbing() {
  return make_structure({
      Domain::monotone(Interval::open(-kInf, 0.0), GeneratingPath::linear(1.0, 0.0, Interval::open(-kInf, 0.0))),
      Domain::constant(Interval::closed_open(0.0, kInf)),
  });
}

// Membership in A by enumerating the blocks and pieces literally. Exact for
// dyadic t with small denominators.
bool in_a_oracle(double t) {
  for (int n = 0; n < 26; ++n) {
    const double start = (std::ldexp(1.0, n) - 1.0) / std::ldexp(1.0, n);
    const double w = std::ldexp(1.0, -2 * (n + 1));
    for (long k = 0; k < (1L << n); ++k) {
      const double a = start + 2.0 * k * w;
      if (t >= a && t < a + w) return true;
      if (t >= a + w && t < a + 2.0 * w) return false;
    }
  }
  ADD_FAILURE() << "t = " << t << " outside the enumerated blocks";
  return false;
}

double cadlag_oracle(double t) {
  if (t >= 1.0) return 0.0;
  return in_a_oracle(t) ? -1.0 + t : 1.0 - t;
}

double cadlag_variation_oracle(int level) {
  const long n = 1L << level;
  double sum = 0.0;
  double prev = cadlag_oracle(0.0);
  for (long i = 1; i <= n; ++i) {
    const double v = cadlag_oracle(static_cast<double>(i) / n);
    sum += std::abs(v - prev);
    prev = v;
  }
  return sum;
}

}  // namespace

TEST(Evaluate, Examples) {
  const auto pure = make_structure({Domain::constant(Interval::real_line())});
  EXPECT_EQ(evaluate(pure, 3.5, 7.0), 3.5);
  EXPECT_NEAR(evaluate(gallery::cantor(), 0.0, 1.0), 1.0, 1e-12);
  const auto m = gallery::mid_deriv_zero();
  for (double t : {0.0, 0.25, 1.0, 3.0}) {
    const double v = evaluate(m, 2.0, t);
    EXPECT_NEAR(v, 1.0 + (t + 1.0) * (t + 1.0), 1e-9);
    EXPECT_GE(v, 1.0);
  }
  EXPECT_NEAR(evaluate(gallery::knick(), -1.0, 1.0), -0.5, 1e-12);
  EXPECT_NEAR(evaluate(gallery::knick(), -1.0, 3.0), 1.0, 1e-12);
}

TEST(Evaluate, AbsorptionAndPermanence) {
  const auto s = absorbing();
  EXPECT_NEAR(evaluate(s, -1.0, 0.5), -0.5, 1e-15);
  EXPECT_EQ(evaluate(s, -1.0, 1.0), 0.0);
  for (int i = 0; i <= 64; ++i) EXPECT_EQ(evaluate(s, -1.0, 1.0 + i * 0.125), 0.0);
}

TEST(Evaluate, RejectsBadArguments) {
  const auto s = linear_plus();
  EXPECT_THROW(evaluate(s, 0.0, -1.0), DomainError);
  EXPECT_THROW(evaluate(s, 0.0, kInf), DomainError);
  EXPECT_THROW(evaluate(s, std::nan(""), 1.0), DomainError);
}

TEST(Evaluate, FlowLaw) {
  for (const Structure& s : {gallery::e1_2(), gallery::knick(), gallery::space_drift(), gallery::mid_deriv_zero(),
                             gallery::partly_cantor(), absorbing()}) {
    double worst = 0.0;
    for (int i = 0; i <= 64; ++i) {
      const double x = -8.0 + i * 0.25;
      for (double t1 : {0.0, 0.25, 1.0, 2.5})
        for (double t2 : {0.0, 0.5, 1.25}) {
          const double lhs = evaluate(s, evaluate(s, x, t1), t2);
          const double rhs = evaluate(s, x, t1 + t2);
          worst = std::max(worst, std::abs(lhs - rhs) / (1.0 + std::abs(rhs)));
        }
    }
    EXPECT_LE(worst, 2e-8) << s.signature();
  }
}

TEST(SamplePath, Examples) {
  const auto lin = sample_path(linear_plus(), 0.0, 1.0, 1);
  ASSERT_EQ(lin.values.size(), 3u);
  EXPECT_EQ(lin.values[0], 0.0);
  EXPECT_EQ(lin.values[1], 0.5);
  EXPECT_EQ(lin.values[2], 1.0);

  const auto c = sample_path(gallery::cantor(), 0.0, 1.0, 10);
  EXPECT_EQ(c.values.front(), 0.0);
  EXPECT_NEAR(c.values.back(), 1.0, 1e-12);
  for (std::size_t i = 1; i < c.values.size(); ++i) EXPECT_LE(c.values[i - 1], c.values[i]);

  for (double v : sample_path(gallery::space_drift(), 0.0, 4.0, 6).values) EXPECT_EQ(v, 0.0);
}

TEST(SamplePath, RefineKeepsExistingSamples) {
  const auto s = gallery::knick();
  const auto coarse = sample_path(s, -1.3, 4.0, 5);
  const auto fine = refine(coarse, flow_of(s));
  const auto direct = sample_path(s, -1.3, 4.0, 6);
  ASSERT_EQ(fine.values.size(), direct.values.size());
  for (std::size_t i = 0; i < coarse.values.size(); ++i) EXPECT_EQ(fine.values[2 * i], coarse.values[i]);
  for (std::size_t i = 0; i < fine.values.size(); ++i) EXPECT_EQ(fine.values[i], direct.values[i]);
  EXPECT_THROW(sample_path(s, 0.0, 0.0, 3), DomainError);
}

TEST(Homogeneity, IdenticalProbesHoldExactly) {
  const auto s = gallery::knick();
  std::vector<HomogeneityProbe> probes;
  for (double x : {-3.0, 0.0, 2.0}) probes.push_back({x, x, 0.7, 0.7, {0.1, 1.0}});
  const auto r = check_time_homogeneity(flow_of(s), probes, 1e-12);
  EXPECT_TRUE(r.holds());
  EXPECT_EQ(r.residual, 0.0);
}

TEST(Homogeneity, SinglePathProbes) {
  const auto s = gallery::e1_2();
  const auto r = check_time_homogeneity(flow_of(s), make_homogeneity_probes(s, 1000), 1e-8);
  EXPECT_TRUE(r.holds()) << r.residual;
  EXPECT_LE(r.residual, 1e-8);
}

TEST(Homogeneity, KnickMixedSignProbes) {
  // From -1 the knick path reaches 0 at time 2; from 0 it is x + t.
  std::vector<HomogeneityProbe> probes{{-1.0, 0.0, 2.0, 0.0, {0.5, 1.0, 3.0}}, {-2.0, -1.0, 2.0, 0.0, {0.25, 4.0}}};
  const auto r = check_time_homogeneity(flow_of(gallery::knick()), probes, 1e-12);
  EXPECT_TRUE(r.holds());
}

TEST(Homogeneity, TimeDependentFamilyFails) {
  auto f = [](double x, double t) { return x + t * t; };
  std::vector<HomogeneityProbe> probes{{0.0, 1.0, 1.0, 0.0, {1.0}}};
  const auto r = check_time_homogeneity(f, probes, 1e-9);
  EXPECT_TRUE(r.fails());
  ASSERT_EQ(r.witnesses.size(), 1u);
  EXPECT_EQ(r.witnesses[0].observed, 4.0);
  EXPECT_EQ(r.witnesses[0].expected, 2.0);
}

TEST(Homogeneity, UnmetProbeIsInconclusive) {
  std::vector<HomogeneityProbe> probes{{0.0, 5.0, 1.0, 1.0, {1.0}}};
  const auto r = check_time_homogeneity(flow_of(linear_plus()), probes, 1e-9);
  EXPECT_EQ(r.verdict, Verdict::inconclusive);
}

TEST(PathShape, ConstantCantorAbsorbed) {
  const auto c = check_path_shape(sample_path(make_structure({Domain::constant(Interval::real_line())}), 1.0, 2.0, 6));
  EXPECT_TRUE(c.report.holds());
  EXPECT_EQ(c.t0, 0.0);
  EXPECT_EQ(c.direction, 0);

  const auto k = check_path_shape(sample_path(gallery::cantor(), 0.0, 2.0, 10));
  EXPECT_TRUE(k.report.holds());
  EXPECT_EQ(k.direction, 1);
  EXPECT_TRUE(std::isinf(k.t0));

  const auto a = check_path_shape(sample_path(absorbing(), -1.0, 2.0, 6));
  EXPECT_TRUE(a.report.holds());
  EXPECT_EQ(a.direction, 1);
  EXPECT_EQ(a.t0, 1.0);
}

TEST(PathShape, ZigZagWitness) {
  const auto r = check_path_shape(sample_path(zigzag_family(), 0.0, 2.0, 8));
  ASSERT_TRUE(r.report.fails());
  ASSERT_FALSE(r.report.witnesses.empty());
  const auto& w = r.report.witnesses.front();
  ASSERT_EQ(w.inputs.size(), 3u);
  EXPECT_LT(w.inputs[0], w.inputs[1]);
  EXPECT_LT(w.inputs[1], w.inputs[2]);
  // The first reversal happens where the path drops from 1/2 to -1/2.
  EXPECT_EQ(w.inputs[2], 0.5);
  EXPECT_EQ(w.observed, -0.5);
}

TEST(Variation, MonotonePaths) {
  const auto lin = total_variation(flow_of(linear_plus()), 0.0, 1.0, 2, 12);
  for (double v : lin.estimates) EXPECT_NEAR(v, 1.0, 1e-15);
  EXPECT_FALSE(lin.diverges);
  const auto c = total_variation(flow_of(gallery::cantor()), 0.0, 1.0, 2, 12);
  for (double v : c.estimates) EXPECT_NEAR(v, 1.0, 1e-12);
  EXPECT_FALSE(c.diverges);
}

TEST(Variation, CadlagPartialSums) {
  const auto r = total_variation(cadlag_family(), -1.0, 1.0, 4, 14);
  ASSERT_EQ(r.estimates.size(), 11u);
  for (std::size_t i = 0; i < r.levels.size(); ++i) EXPECT_NEAR(r.estimates[i], cadlag_variation_oracle(r.levels[i]), 1e-9);
  for (std::size_t i = 1; i < r.estimates.size(); ++i) EXPECT_GE(r.estimates[i], r.estimates[i - 1]);
  EXPECT_GT(r.estimates.back(), 3.0 * r.estimates.front());
  EXPECT_TRUE(r.diverges);
}

TEST(Variation, CapAloneRaisesFlag) {
  auto fast = [](double x, double t) { return x + 1e7 * t; };
  EXPECT_TRUE(total_variation(fast, 0.0, 1.0, 2, 4).diverges);
  EXPECT_FALSE(total_variation(fast, 0.0, 1.0, 2, 4, 1e9).diverges);
}

TEST(Continuity, StructurePathsHold) {
  for (const Structure& s : {gallery::e1_2(), gallery::cantor(), gallery::knick(), absorbing()}) {
    const auto r = check_continuity(sample_path(s, -0.75, 4.0, 12), 1e-2);
    EXPECT_TRUE(r.holds()) << s.signature() << " gap " << r.residual;
  }
}

TEST(Continuity, StepFailsAtJump) {
  std::vector<double> xs, vs;
  for (int i = 0; i <= 256; ++i) {
    xs.push_back(i / 256.0);
    vs.push_back(xs.back() < 0.3 ? 0.0 : 1.0);
  }
  const auto r = check_continuity(xs, vs, 1e-3);
  ASSERT_TRUE(r.fails());
  EXPECT_LT(r.witnesses[0].inputs[0], 0.3);
  EXPECT_GE(r.witnesses[0].inputs[1], 0.3);
}

TEST(Continuity, CadlagPathFails) {
  EXPECT_TRUE(check_continuity(sample_path(cadlag_family(), -1.0, 1.0, 12), 1e-2).fails());
  EXPECT_THROW(check_continuity(std::vector<double>{0, 1}, std::vector<double>{0, 1}, 1e-3), DomainError);
}
