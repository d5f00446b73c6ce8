#include <gtest/gtest.h>

#include <map>
#include <set>

#include "dethunt/gallery.hpp"
#include "dethunt/io.hpp"
#include "dethunt/specdsl.hpp"

using namespace dethunt;

namespace {

std::map<std::string, std::string> expected_of(const GalleryEntry& e) {
  std::map<std::string, std::string> m;
  for (const auto& [id, v] : e.expected) m[id] = to_string(v);
  return m;
}

const GalleryEntry& find(const std::vector<GalleryEntry>& g, const std::string& name) {
  for (const auto& e : g)
    if (e.name == name) return e;
  throw std::runtime_error("no gallery entry " + name);
}

}  // namespace

TEST(Gallery, EightDistinctEntries) {
  const auto g = build_gallery();
  ASSERT_EQ(g.size(), 8u);
  std::set<std::string> names;
  for (const auto& e : g) {
    names.insert(e.name);
    EXPECT_FALSE(e.locator.empty());
    EXPECT_FALSE(e.expected.empty());
  }
  EXPECT_EQ(names.size(), 8u);
  EXPECT_FALSE(find(g, "e2_9").is_structure());
  EXPECT_FALSE(find(g, "cadlag_5_5").is_structure());
}

TEST(Gallery, ClassificationTable) {
  const auto g = build_gallery();
  EXPECT_EQ(expected_of(find(g, "cantor")).at("feller"), "holds");
  EXPECT_EQ(expected_of(find(g, "cantor")).at("rich"), "fails");
  EXPECT_EQ(expected_of(find(g, "cantor")).at("ito"), "fails");
  EXPECT_EQ(expected_of(find(g, "knick")).at("feller"), "holds");
  EXPECT_EQ(expected_of(find(g, "knick")).at("rich"), "fails");
  EXPECT_EQ(expected_of(find(g, "space_drift")).at("feller"), "fails");
  EXPECT_EQ(expected_of(find(g, "mid_deriv_zero")).at("feller"), "fails");
  EXPECT_EQ(expected_of(find(g, "e2_9")).at("variation_diverges"), "holds");
  EXPECT_EQ(expected_of(find(g, "cadlag_5_5")).at("variation_diverges"), "holds");
}

TEST(Gallery, RegressionMatchesWithinBudget) {
  const auto g = build_gallery();
  const GalleryRun run = run_gallery(g);
  for (const GalleryRow& r : run.rows) {
    EXPECT_TRUE(r.match()) << r.entry << " " << r.property << ": expected " << to_string(r.expected) << ", observed "
                           << to_string(r.observed) << " residual " << r.report.residual;
  }
  for (const auto& e : g) EXPECT_TRUE(run.entry_matches(e.name)) << e.name;
  EXPECT_LE(run.seconds, 60.0);
}

TEST(Gallery, SampleSpecFilesMatchBuilders) {
  const std::string dir = DETHUNT_SPECS_DIR;
  const std::vector<std::pair<std::string, Structure>> pairs{
      {"cantor.hunt", gallery::cantor()},         {"knick.hunt", gallery::knick()},
      {"space_drift.hunt", gallery::space_drift()}, {"mid_deriv_zero.hunt", gallery::mid_deriv_zero()},
      {"partly_cantor.hunt", gallery::partly_cantor()}, {"single_path.hunt", gallery::e1_2()},
  };
  for (const auto& [file, built] : pairs) {
    const auto text = directory_resolver(dir)(file);
    ASSERT_TRUE(text) << file;
    const auto b = load_spec(*text, directory_resolver(dir));
    ASSERT_TRUE(b.ok()) << file << ": " << (b.diagnostics.empty() ? "" : b.diagnostics[0].str());
    for (int i = 0; i <= 32; ++i)
      for (double t : {0.0, 0.5, 1.75}) {
        const double x = -4.0 + i * 0.25;
        EXPECT_NEAR(evaluate(*b.structure, x, t), evaluate(built, x, t), 1e-9) << file << " x=" << x << " t=" << t;
      }
  }
  const auto bad = load_spec(*directory_resolver(dir)("invalid_plus_below_minus.hunt"));
  EXPECT_FALSE(bad.ok());
}

TEST(Gallery, ManifestJson) {
  const auto g = build_gallery();
  const Json m = gallery_manifest(g);
  ASSERT_EQ(m.size(), 8u);
  EXPECT_EQ(m[0]["name"], "e1_2");
  EXPECT_EQ(m[1]["kind"], "raw_family");
  EXPECT_EQ(m[2]["expected"]["feller"], "holds");
  const Json back = Json::parse(m.dump());
  EXPECT_EQ(back, m);
}
