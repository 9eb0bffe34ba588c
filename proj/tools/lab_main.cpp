#include <CLI11.hpp>

#include <cstdio>
#include <string>

#include "lab/harness.hpp"

int main(int argc, char** argv) {
  CLI::App app{"spectral laboratory for lacunary initial data on the 3-torus"};
  app.require_subcommand(1);

  std::string config, out = "runs";
  bool seed_check = false, strict = false;

  const std::pair<const char*, const char*> subs[] = {
      {"construct", "build the lacunary initial data, write snapshots, blocks, and norm tables"},
      {"verify", "fit the trilinear scaling laws and norm uniformity against their predictions"},
      {"region", "sample the admissible (1/r, s) parameter region and trace its boundary"},
      {"simulate", "run the pseudo-spectral solver and record shell energies and productions"},
      {"report", "render plot-ready files and a text summary from a stored run"},
  };
  for (const auto& [name, desc] : subs) {
    CLI::App* s = app.add_subcommand(name, desc);
    s->add_option("--config", config,
                  std::string("schema-1 JSON config") +
                      (std::string(name) == "report" ? " (run directory or manifest.json)" : ""));
    s->add_option("--out", out, "experiment store root (default: runs)");
    s->add_flag("--seed-check", seed_check, "recompute and require bit-identical artifacts");
    s->add_flag("--strict-boundaries", strict, "strict (<) admissibility caps instead of <=");
  }

  CLI11_PARSE(app, argc, argv);

  lab::CliOptions opt;
  opt.config = config;
  opt.out = out;
  opt.seed_check = seed_check;
  opt.strict_boundaries = strict;
  try {
    return lab::run_command(app.get_subcommands().front()->get_name(), opt);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "lab: %s\n", e.what());
    return 1;
  }
}
