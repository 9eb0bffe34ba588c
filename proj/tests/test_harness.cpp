#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "lab/errors.hpp"
#include "lab/harness.hpp"
#include "lab/io.hpp"

using namespace lab;
namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

// Fresh scratch directory per test case, removed on destruction.
struct Scratch {
  fs::path dir;
  explicit Scratch(const std::string& tag) {
    static int counter = 0;
    dir = fs::temp_directory_path() /
          ("labtest-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    fs::create_directories(dir);
  }
  ~Scratch() {
    std::error_code ec;
    fs::remove_all(dir, ec);
  }
  fs::path config(const json& j) const {
    const fs::path p = dir / "config.json";
    std::ofstream(p) << j.dump(2);
    return p;
  }
  CliOptions opts(const json& cfg) const {
    CliOptions o;
    o.config = config(cfg);
    o.out = dir / "runs";
    return o;
  }
  // The single run directory produced under runs/ (asserts there is exactly
  // one whose name starts with the command prefix when unique=true).
  fs::path only_run() const {
    fs::path found;
    int count = 0;
    for (const auto& e : fs::directory_iterator(dir / "runs")) {
      ++count;
      found = e.path();
    }
    REQUIRE(count == 1);
    return found;
  }
};

json manifest_of(const fs::path& run) { return json::parse(read_text(run / "manifest.json")); }

bool check_passed(const json& man, const std::string& name) {
  for (const json& c : man["checks"])
    if (c["name"] == name) return c["pass"].get<bool>();
  FAIL("no check named " << name);
  return false;
}

}  // namespace

TEST_CASE("snapshots round-trip bit for bit") {
  Scratch sc("svf");
  SpectralField u{GridSpec(16)}, b{GridSpec(16)};
  u.set_real_pair({1, 2, 3}, {cplx{0.25, -0.5}, cplx{1e-17, 3.0}, cplx{-2.0, 0.125}});
  u.set_real_pair({7, -7, 7}, {cplx{1.0, 1.0}, cplx{0.0, -1.0}, cplx{0.5, 0.0}});
  b.set_real_pair({0, 4, -2}, {cplx{0.1, 0.2}, cplx{0.3, 0.4}, cplx{0.5, 0.6}});

  const fs::path p = sc.dir / "state.svf";
  write_svf(p, u, &b);
  const SvfSnapshot back = read_svf(p);
  CHECK(back.u.grid.n == 16);
  REQUIRE(back.b.has_value());
  for (int c = 0; c < 3; ++c)
    for (std::size_t i = 0; i < u.grid.size(); ++i) {
      CHECK(back.u.c[c][i] == u.c[c][i]);
      CHECK(back.b->c[c][i] == b.c[c][i]);
    }

  // velocity-only file has no magnetic payload and half the data
  const fs::path pu = sc.dir / "u.svf";
  write_svf(pu, u);
  CHECK(!read_svf(pu).b.has_value());
  CHECK(fs::file_size(pu) == 12 + 15u * 15 * 15 * 48);

  // the store is append-only: overwriting is refused
  CHECK_THROWS_AS(write_svf(p, u), lab::Error);

  // corrupted inputs are rejected, not misread
  std::string bytes = read_text(p);
  bytes[0] = 'X';
  const fs::path bad = sc.dir / "bad.svf";
  write_text_create_new(bad, bytes);
  CHECK_THROWS_AS(read_svf(bad), lab::Error);
  const fs::path trunc = sc.dir / "trunc.svf";
  write_text_create_new(trunc, read_text(p).substr(0, 1000));
  CHECK_THROWS_AS(read_svf(trunc), lab::Error);
}

TEST_CASE("error classes map onto the documented exit codes") {
  CHECK(exit_code_for(Err::invalid_parameter) == 2);
  CHECK(exit_code_for(Err::resolution) == 3);
  CHECK(exit_code_for(Err::insufficient_data) == 4);
  CHECK(exit_code_for(Err::blow_up) == 5);
  CHECK(exit_code_for(Err::missing_artifact) == 6);
  CHECK(exit_code_for(Err::cfl_rejected) == 7);
  CHECK(exit_code_for(Err::io_failure) == 1);
}

TEST_CASE("region runs write the grid, the boundary, and a manifest") {
  Scratch sc("region");
  const CliOptions opt = sc.opts(json{{"resolution", 32}});
  CHECK(cmd_region(opt) == 0);

  const fs::path run = sc.only_run();
  const json man = manifest_of(run);
  CHECK(man["schema"] == 1);
  CHECK(man["command"] == "region");
  CHECK(man["exit_code"] == 0);
  CHECK(check_passed(man, "area_sane"));
  const double area = man["summary"]["area"].get<double>();
  CHECK(area > 0.1);
  CHECK(area < 0.9);

  // artifacts exist and match their recorded digests
  for (const auto& [name, meta] : man["artifacts"].items()) {
    const std::string bytes = read_text(run / name);
    CHECK(crc32_hex(crc32_of(bytes)) == meta["crc32"].get<std::string>());
    CHECK(bytes.size() == meta["bytes"].get<std::size_t>());
  }
  const std::string csv = read_text(run / "region.csv");
  CHECK(csv.rfind("inv_r,s,theta,gamma,admissible,branch\n", 0) == 0);
  CHECK(read_text(run / "boundary.csv").rfind("x0,s0,x1,s1\n", 0) == 0);

  // the run id is derived from the config digest
  const std::string id = man["id"].get<std::string>();
  CHECK(id.rfind("region-", 0) == 0);
  CHECK(man["config_digest"].get<std::string>() ==
        id.substr(7, 8));
}

TEST_CASE("construct persists blocks, norm tables, and snapshots") {
  Scratch sc("construct");

  // two-stage sparse build: cheap, exercises tables without a grid
  CHECK(cmd_construct(sc.opts(json{{"stages", 2}, {"mhd", true}})) == 0);
  const fs::path run = sc.only_run();
  const json man = manifest_of(run);
  CHECK(check_passed(man, "solenoidal"));
  CHECK(check_passed(man, "hermitian"));
  CHECK(check_passed(man, "stage_count"));
  CHECK(!man["artifacts"].contains("initial.svf"));

  const json blocks = json::parse(read_text(run / "blocks.json"));
  CHECK(blocks["stages"].size() == 2);
  CHECK(blocks["stages"][0]["q"] == 3);
  CHECK(blocks["stages"][1]["q"] == 6);
  CHECK(blocks["stages"][0]["velocity_blocks"].size() > 0);
  CHECK(blocks["stages"][0]["magnetic_blocks"].size() > 0);

  const json norms = json::parse(read_text(run / "norms.json"));
  // u and b tables for each of r = 2, 4, inf
  CHECK(norms["tables"].size() == 6);
  for (const json& t : norms["tables"]) CHECK(t["rows"].size() == 2);

  // one-stage build fits an n=32 grid, so a snapshot gets written
  Scratch gr("construct-grid");
  CHECK(cmd_construct(gr.opts(json{{"stages", 1}, {"mhd", true}, {"grid_n", 32}})) == 0);
  const SvfSnapshot snap = read_svf(gr.only_run() / "initial.svf");
  CHECK(snap.u.grid.n == 32);
  CHECK(snap.b.has_value());
}

TEST_CASE("construct rejects bad parameters and impossible grids") {
  Scratch bad("construct-bad");
  CHECK(cmd_construct(bad.opts(json{{"theta", 1.4}})) == 2);
  const json man = manifest_of(bad.only_run());
  CHECK(man["exit_code"] == 2);
  CHECK(man["reason"].get<std::string>().find("theta") != std::string::npos);

  Scratch tight("construct-tight");
  // stage q=6 has blocks out to wavenumber 72: nowhere to put them at n=32
  CHECK(cmd_construct(tight.opts(json{{"stages", 2}, {"grid_n", 32}})) == 3);
  CHECK(manifest_of(tight.only_run())["exit_code"] == 3);
}

TEST_CASE("verify fits the scaling slopes and reports honestly") {
  // clean scaling regime: first shell high enough that the remainder terms
  // are negligible, so the fitted slope lands on the prediction
  Scratch sc("verify");
  CHECK(cmd_verify(sc.opts(json{{"q1", 15}, {"stages", 3}})) == 0);
  const json man = manifest_of(sc.only_run());
  CHECK(check_passed(man, "slope:B(u0,u0,U_q)"));

  const json reports = json::parse(read_text(sc.only_run() / "trilinear_reports.json"));
  REQUIRE(reports["reports"].size() == 1);
  const double slope = reports["reports"][0]["slope"].get<double>();
  CHECK(slope == doctest::Approx(1.0).epsilon(0.3));

  // too few stages for any slope: insufficient data, not a crash
  Scratch two("verify-two");
  CHECK(cmd_verify(two.opts(json{{"stages", 2}})) == 4);
  CHECK(manifest_of(two.only_run())["exit_code"] == 4);
}

TEST_CASE("simulate smoke run: diffusion only, exact budget") {
  Scratch sc("sim-diff");
  const json cfg{
      {"mode", "nse"},
      {"grid_n", 32},
      {"dt", 0.01},
      {"t_end", 0.05},
      {"record_every", 2},
      {"disable_nonlinearity", true},
      {"tracked_shells", json{{"u", json::array({3})}, {"b", json::array()}}},
      {"besov", nullptr},  // merge-patch deletion: no besov recording
      {"data", json{{"stages", 1}}},
  };
  CHECK(cmd_simulate(sc.opts(cfg)) == 0);
  const fs::path run = sc.only_run();
  const json man = manifest_of(run);
  CHECK(check_passed(man, "energy_balance"));
  CHECK(check_passed(man, "solenoidal_final"));
  CHECK(check_passed(man, "hermitian_final"));
  CHECK(man["summary"]["energy_residual"].get<double>() <= 1e-10);

  const std::string hist = read_text(run / "history.csv");
  CHECK(hist.rfind("t,E_u,E_b,diss_u,diss_b,ue_q3,up_q3,besov_u,besov_b\n", 0) == 0);
  const SvfSnapshot fin = read_svf(run / "final.svf");
  CHECK(fin.u.grid.n == 32);
  CHECK(!fin.b.has_value());
}

TEST_CASE("simulate runs the coupled desk problem and closes the budget") {
  Scratch sc("sim-mhd");
  const json cfg{
      {"grid_n", 32},
      {"dt", 2e-3},
      {"t_end", 0.02},
      {"record_every", 5},
      {"besov_oversample", 1},
  };
  CHECK(cmd_simulate(sc.opts(cfg)) == 0);
  const json man = manifest_of(sc.only_run());
  CHECK(check_passed(man, "energy_balance"));
  CHECK(check_passed(man, "shell_budget"));
  CHECK(man["summary"]["besov_probes"].size() == 2);  // 1e-3 and 1e-2 fit in t_end
}

TEST_CASE("simulate surfaces solver rejections as exit codes") {
  Scratch cfl("sim-cfl");
  CHECK(cmd_simulate(cfl.opts(json{{"grid_n", 32}, {"dt", 10.0}, {"t_end", 1.0}})) == 7);
  const json man = manifest_of(cfl.only_run());
  CHECK(man["exit_code"] == 7);
  CHECK(man["reason"].get<std::string>().find("advective bound") != std::string::npos);

  Scratch res("sim-res");
  // second construction stage cannot fit the n=32 band
  CHECK(cmd_simulate(res.opts(json{{"grid_n", 32}, {"data", json{{"stages", 2}}}})) == 3);

  Scratch badmode("sim-mode");
  CHECK(cmd_simulate(badmode.opts(json{{"mode", "nse"}})) == 2);  // still tracks b shells
}

TEST_CASE("identical configs reproduce identical artifacts") {
  const json cfg{
      {"grid_n", 32},   {"dt", 2e-3},          {"t_end", 0.01},
      {"record_every", 5}, {"besov_oversample", 1},
  };
  Scratch sc("sim-det");
  CliOptions opt = sc.opts(cfg);
  CHECK(cmd_simulate(opt) == 0);
  CHECK(cmd_simulate(opt) == 0);

  std::vector<fs::path> runs;
  for (const auto& e : fs::directory_iterator(sc.dir / "runs")) runs.push_back(e.path());
  REQUIRE(runs.size() == 2);
  // same digest, distinct directories, identical bytes
  CHECK(manifest_of(runs[0])["config_digest"] == manifest_of(runs[1])["config_digest"]);
  CHECK(read_text(runs[0] / "history.csv") == read_text(runs[1] / "history.csv"));
  CHECK(read_text(runs[0] / "final.svf") == read_text(runs[1] / "final.svf"));

  // the built-in recompute check agrees
  Scratch seeded("sim-seed");
  CliOptions sopt = seeded.opts(cfg);
  sopt.seed_check = true;
  CHECK(cmd_simulate(sopt) == 0);
  CHECK(check_passed(manifest_of(seeded.only_run()), "determinism"));
}

TEST_CASE("report renders stored runs without recomputing") {
  Scratch sc("report");
  const json cfg{
      {"grid_n", 32},   {"dt", 2e-3},          {"t_end", 0.01},
      {"record_every", 5}, {"besov_oversample", 1},
  };
  REQUIRE(cmd_simulate(sc.opts(cfg)) == 0);
  const fs::path run = sc.only_run();

  CliOptions ropt;
  ropt.config = run;
  CHECK(cmd_report(ropt) == 0);
  CHECK(fs::exists(run / "report" / "summary.txt"));
  const std::string ts = read_text(run / "report" / "shell_timeseries.csv");
  CHECK(ts.rfind("t,ue_q3,up_q3,be_q2,bp_q2\n", 0) == 0);

  // idempotent: a second render must reproduce the same bytes and exit 0
  CHECK(cmd_report(ropt) == 0);

  // pointing at nothing is a missing artifact
  CliOptions gone;
  gone.config = sc.dir / "no-such-run";
  CHECK(cmd_report(gone) == 6);

  // a missing artifact inside a real run is detected
  Scratch copy("report-copy");
  fs::copy(run, copy.dir / "run", fs::copy_options::recursive);
  fs::remove(copy.dir / "run" / "history.csv");
  CliOptions copt;
  copt.config = copy.dir / "run";
  CHECK(cmd_report(copt) == 6);

  // and so is a corrupted one
  Scratch corrupt("report-corrupt");
  fs::copy(run, corrupt.dir / "run", fs::copy_options::recursive);
  {
    std::ofstream f(corrupt.dir / "run" / "history.csv", std::ios::app);
    f << "tampered\n";
  }
  CliOptions xopt;
  xopt.config = corrupt.dir / "run";
  CHECK(cmd_report(xopt) == 1);
}

TEST_CASE("config handling: merge-patch, bad json, bad thread caps") {
  Scratch sc("cfg");
  // defaults fill whatever the config leaves out; a partial data object
  // only overrides the keys it names
  const fs::path p = sc.dir / "partial.json";
  std::ofstream(p) << R"({"grid_n": 32, "dt": 2e-3, "t_end": 0.004, "record_every": 5,
                          "besov": null, "data": {"theta": 1.9}})";
  CliOptions opt;
  opt.config = p;
  opt.out = sc.dir / "runs";
  CHECK(cmd_simulate(opt) == 0);
  const json stored = json::parse(read_text(sc.only_run() / "config.json"));
  CHECK(stored["data"]["theta"] == 1.9);
  CHECK(stored["data"]["q1"] == 3);       // untouched default
  CHECK(stored["mode"] == "mhd");         // untouched default
  CHECK(!stored.contains("besov"));       // null deletes

  Scratch bad("cfg-bad");
  const fs::path pb = bad.dir / "broken.json";
  std::ofstream(pb) << "{not json";
  CliOptions bopt;
  bopt.config = pb;
  bopt.out = bad.dir / "runs";
  CHECK(cmd_region(bopt) == 2);

  Scratch env("cfg-env");
  ::setenv("LAB_THREADS", "zero", 1);
  CHECK(cmd_region(env.opts(json{{"resolution", 8}})) == 2);
  ::setenv("LAB_THREADS", "4", 1);
  Scratch env2("cfg-env2");
  CHECK(cmd_region(env2.opts(json{{"resolution", 8}})) == 0);
  const json man = manifest_of(env2.only_run());
  CHECK(man["threads"]["requested"] == 4);
  CHECK(man["threads"]["effective"] == 1);
  ::unsetenv("LAB_THREADS");
}
