#include <CLI11.hpp>

#include "dethunt/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"huntctl: deterministic Hunt process toolkit"};
  app.require_subcommand(1);
  dethunt::cli::Config cfg;

  auto add_common = [&](CLI::App* sub, bool needs_spec) {
    auto* spec = sub->add_option("--spec", cfg.spec_path, "huntspec v1 file");
    if (needs_spec) spec->required();
    sub->add_option("--x", cfg.xs, "comma separated starting points")->delimiter(',');
    sub->add_option("--xi", cfg.xis, "comma separated frequencies")->delimiter(',');
    sub->add_option("--T", cfg.T, "time horizon");
    sub->add_option("--level", cfg.level, "dyadic refinement level");
    sub->add_option("--window", cfg.window, "half width of the x window");
    sub->add_option("--tol", cfg.tol, "tolerance");
    sub->add_option("--format", cfg.format, "json, csv or svg")->check(CLI::IsMember({"json", "csv", "svg", "text"}));
    sub->add_option("--out", cfg.out, "output file (default: standard output)");
  };
  add_common(app.add_subcommand("validate", "parse and validate a spec"), true);
  add_common(app.add_subcommand("classify", "property report bundle as JSON"), true);
  add_common(app.add_subcommand("eval", "sample paths as CSV, SVG or JSON"), true);
  add_common(app.add_subcommand("symbol", "symbol table over an (x, xi) grid as CSV"), true);
  add_common(app.add_subcommand("export", "re-emit the canonical spec"), true);
  auto* gallery = app.add_subcommand("gallery", "run the regression gallery");
  add_common(gallery, false);
  cfg.format = "json";

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : dethunt::cli::kInternal;
  }
  cfg.command = app.get_subcommands().front()->get_name();
  if (cfg.command == "gallery" && gallery->count("--format") == 0) cfg.format = "text";
  return dethunt::cli::run(cfg);
}
