#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "dethunt/cli.hpp"

using namespace dethunt;

namespace {

std::string spec(const std::string& name) { return std::string(DETHUNT_SPECS_DIR) + "/" + name; }

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run_cli(cli::Config cfg) {
  std::ostringstream out, err;
  const int code = cli::run(cfg, out, err);
  return {code, out.str(), err.str()};
}

cli::Config command(const std::string& name, std::optional<std::string> path = std::nullopt) {
  cli::Config c;
  c.command = name;
  c.spec_path = std::move(path);
  return c;
}

}  // namespace

TEST(Cli, ValidatePureConstant) {
  const auto o = run_cli(command("validate", spec("pure_const.hunt")));
  EXPECT_EQ(o.code, cli::kOk);
  const Json j = Json::parse(o.out);
  EXPECT_EQ(j["valid"], true);
  EXPECT_EQ(j["structure"], "⊙");
}

TEST(Cli, ExitCodes) {
  const auto invalid = run_cli(command("validate", spec("invalid_plus_below_minus.hunt")));
  EXPECT_EQ(invalid.code, cli::kInvalidSpec);
  const Json faults = Json::parse(invalid.err);
  EXPECT_EQ(faults["valid"], false);
  EXPECT_EQ(faults["faults"][0]["rule_id"], "R2");

  EXPECT_EQ(run_cli(command("validate", spec("does_not_exist.hunt"))).code, cli::kIoError);
  EXPECT_EQ(run_cli(command("validate")).code, cli::kIoError);

  const auto dir = std::filesystem::temp_directory_path() / "dethunt_cli_test";
  std::filesystem::create_directories(dir);
  std::ofstream(dir / "broken.hunt") << "huntspec v1\nplus (-inf,inf) path=spline I=(-inf,inf)\n";
  const auto malformed = run_cli(command("classify", (dir / "broken.hunt").string()));
  EXPECT_EQ(malformed.code, cli::kInvalidSpec);
  EXPECT_NE(malformed.err.find("\"line\": 2"), std::string::npos);

  auto bad_tol = command("validate", spec("pure_const.hunt"));
  bad_tol.tol = -1.0;
  EXPECT_EQ(run_cli(bad_tol).code, cli::kInternal);
  std::filesystem::remove_all(dir);
}

TEST(Cli, ClassifyCantor) {
  const auto o = run_cli(command("classify", spec("cantor.hunt")));
  ASSERT_EQ(o.code, cli::kOk) << o.err;
  const Json j = Json::parse(o.out);
  EXPECT_EQ(j["summary"]["feller"], "holds");
  EXPECT_EQ(j["summary"]["rich"], "fails");
  EXPECT_EQ(j["summary"]["hunt"], "holds");
  EXPECT_EQ(j["summary"]["semimartingale"], "holds");
  EXPECT_EQ(j["summary"]["homogeneity"], "holds");
  for (const char* key : {"hunt", "semimartingale", "cb_feller", "feller", "rich", "homogeneity"}) EXPECT_TRUE(j["summary"].contains(key)) << key;
}

TEST(Cli, ClassifyIsDeterministic) {
  const auto a = run_cli(command("classify", spec("space_drift.hunt")));
  const auto b = run_cli(command("classify", spec("space_drift.hunt")));
  EXPECT_EQ(a.code, cli::kOk);
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(Json::parse(a.out)["summary"]["feller"], "fails");
}

TEST(Cli, EvalFormats) {
  auto c = command("eval", spec("knick.hunt"));
  c.xs = {-1.0, 2.0};
  c.T = 2.0;
  c.level = 2;
  c.format = "csv";
  const auto csv = run_cli(c);
  ASSERT_EQ(csv.code, cli::kOk) << csv.err;
  EXPECT_EQ(csv.out.substr(0, csv.out.find('\n')), "x,t,value");
  EXPECT_NE(csv.out.find("-1,1,-0.5\n"), std::string::npos);
  EXPECT_NE(csv.out.find("2,2,4\n"), std::string::npos);
  EXPECT_EQ(std::count(csv.out.begin(), csv.out.end(), '\n'), 11);

  c.format = "svg";
  const auto svg = run_cli(c);
  EXPECT_EQ(svg.out.rfind("<svg", 0), 0u);
  EXPECT_NE(svg.out.find("viewBox=\"0 0 800 500\""), std::string::npos);
  EXPECT_NE(svg.out.find("<polyline"), std::string::npos);

  c.format = "json";
  const Json j = Json::parse(run_cli(c).out);
  ASSERT_EQ(j.size(), 2u);
  EXPECT_EQ(j[1]["values"][4], 4.0);
}

TEST(Cli, SymbolTable) {
  auto c = command("symbol", spec("space_drift.hunt"));
  c.xs = {-1.0, 0.0, 1.0};
  c.xis = {2.0};
  const auto o = run_cli(c);
  ASSERT_EQ(o.code, cli::kOk);
  EXPECT_EQ(o.out, "x,xi,re,im\n-1,2,0,2\n0,2,0,0\n1,2,0,-2\n");
  const auto cantor = run_cli([] {
    auto k = command("symbol", spec("cantor.hunt"));
    k.xs = {0.0};
    k.xis = {1.0};
    return k;
  }());
  EXPECT_EQ(cantor.out, "x,xi,re,im\n0,1,nan,nan\n");
}

TEST(Cli, ExportWritesSidecars) {
  const auto dir = std::filesystem::temp_directory_path() / "dethunt_cli_export";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  auto c = command("export", spec("knick.hunt"));
  c.out = (dir / "knick_canonical.hunt").string();
  ASSERT_EQ(run_cli(c).code, cli::kOk);
  EXPECT_TRUE(std::filesystem::exists(dir / "domain0.polyline"));
  const auto again = run_cli(command("validate", c.out));
  EXPECT_EQ(again.code, cli::kOk) << again.err;
  std::filesystem::remove_all(dir);
}

TEST(Cli, GalleryTable) {
  auto c = command("gallery");
  c.format = "text";
  const auto o = run_cli(c);
  EXPECT_EQ(o.code, cli::kOk);
  EXPECT_NE(o.out.find("8/8 entries PASS"), std::string::npos) << o.out;
  EXPECT_EQ(o.out.find("FAIL"), std::string::npos);
}

TEST(Cli, UnknownCommand) { EXPECT_EQ(run_cli(command("frobnicate")).code, cli::kInternal); }
