#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "fbp_app/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"fbp: plane-coupled one-phase free boundary lab"};
  app.require_subcommand(1);

  std::string config;
  std::string out;
  int jobs = 1;
  bool quiet = false;

  const char* names[][2] = {
      {"solve", "full pipeline (FULL or SLAB_TEST config)"},
      {"axisym", "axisymmetric pipeline in (r, y)"},
      {"oracle", "one-dimensional penalized profiles"},
      {"reduce", "full solve plus the reduced plane obstacle comparison"},
      {"sweep", "cartesian sweep over rho0, eps0 and grid levels"},
      {"verify", "re-run the checks on saved artifacts"},
  };
  for (const auto& n : names) {
    CLI::App* sub = app.add_subcommand(n[0], n[1]);
    sub->add_option("--config", config, "JSON run configuration")->check(CLI::ExistingFile);
    sub->add_option("--out", out, "output directory (overrides output_dir)");
    sub->add_option("--jobs", jobs, "concurrent runs for sweep")->check(CLI::PositiveNumber);
    sub->add_flag("--quiet", quiet, "suppress progress lines");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : fbp::app::kConfigInvalid;
  }

  fbp::app::CommandOptions opt;
  opt.out_dir = out;
  opt.jobs = jobs;
  opt.progress = quiet ? nullptr : &std::cerr;
  opt.log = &std::cerr;
  return fbp::app::dispatch(app.get_subcommands().front()->get_name(), config, opt);
}
