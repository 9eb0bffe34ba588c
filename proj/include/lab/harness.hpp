#pragma once
#include <filesystem>
#include <string>

#include "lab/errors.hpp"

namespace lab {

// Options shared by every subcommand.  config empty means built-in defaults;
// out is the experiment store root (created on demand, append-only after
// that); seed_check recomputes the whole command and demands bit-identical
// artifacts; strict_boundaries tightens the admissibility caps from <= to <.
struct CliOptions {
  std::filesystem::path config;
  std::filesystem::path out = "runs";
  bool seed_check = false;
  bool strict_boundaries = false;
};

// Process exit code for a failure class.  0 is success, 1 a failed check or
// internal error, then: 2 invalid parameters, 3 resolution, 4 insufficient
// data, 5 blow-up, 6 missing artifact, 7 CFL rejection.
int exit_code_for(Err code);

// Each command resolves its config (defaults overlaid with the --config
// JSON merge-patch), runs, and persists runs/<id>/{config.json, manifest.json,
// artifacts...} with <id> derived from the config digest.  Nonzero exits
// record a machine-readable reason in the manifest.
int cmd_construct(const CliOptions& opt);
int cmd_verify(const CliOptions& opt);
int cmd_region(const CliOptions& opt);
int cmd_simulate(const CliOptions& opt);

// Renders plot-ready files and a text summary from a stored run (config is
// the run directory or its manifest.json).  Never recomputes and never
// rewrites: existing report files must match the fresh render byte for byte.
int cmd_report(const CliOptions& opt);

int run_command(const std::string& name, const CliOptions& opt);

}  // namespace lab
