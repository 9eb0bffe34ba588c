#include "lab/harness.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <functional>
#include <map>
#include <sstream>
#include <utility>
#include <vector>

#include "lab/construction.hpp"
#include "lab/io.hpp"
#include "lab/region.hpp"
#include "lab/shells.hpp"
#include "lab/solver.hpp"
#include "lab/specnorms.hpp"
#include "lab/symbols.hpp"
#include "lab/trilinear.hpp"

namespace lab {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

constexpr double kTwoPiCubed = 248.05021344239853;

// ---------------------------------------------------------------- config ---

double to_number(const json& v, const std::string& where) {
  if (!v.is_number()) fail(Err::invalid_parameter, where + " must be a number");
  return v.get<double>();
}

double to_number_or_inf(const json& v, const std::string& where) {
  if (v.is_string() && (v == "inf" || v == "infinity")) return INFINITY;
  return to_number(v, where);
}

double num(const json& j, const char* key) { return to_number(j.at(key), key); }

int integer(const json& j, const char* key) {
  const json& v = j.at(key);
  if (!v.is_number_integer()) fail(Err::invalid_parameter, std::string(key) + " must be an integer");
  return v.get<int>();
}

bool boolean(const json& j, const char* key) {
  const json& v = j.at(key);
  if (!v.is_boolean()) fail(Err::invalid_parameter, std::string(key) + " must be a boolean");
  return v.get<bool>();
}

std::string r_label(double r) {
  if (std::isinf(r)) return "inf";
  std::ostringstream os;
  os << r;
  return os.str();
}

json construct_defaults() {
  return json{
      {"schema", 1},      {"theta", 2.0},     {"gamma", 2.0},
      {"c", 0.125},       {"q1", 3},          {"stages", 4},
      {"mhd", false},     {"budget", 5000000}, {"grid_n", 0},
      {"norm_orders", json::array({2.0, 4.0, "inf"})},
  };
}

json verify_defaults() {
  json j = construct_defaults();
  j.erase("grid_n");
  j["recip_tol"] = 5e-4;
  j["recip_dmax"] = 3;
  return j;
}

json region_defaults() {
  return json{{"schema", 1}, {"resolution", 64}, {"mode", "nse"}, {"gamma", 2.0}};
}

json simulate_defaults() {
  return json{
      {"schema", 1},
      {"mode", "mhd"},
      {"grid_n", 64},
      {"mu", 1e-3},
      {"nu", 1e-3},
      {"dt", "auto"},
      {"t_end", 0.1},
      {"record_every", 10},
      {"max_steps", 100000},
      {"dealias", true},
      {"disable_nonlinearity", false},
      {"snapshots", true},
      {"besov_oversample", 2},
      {"tracked_shells", json{{"u", json::array({3})}, {"b", json::array({2})}}},
      {"besov", json{{"s", -1.0}, {"r", "inf"}}},
      {"data", json{{"theta", 2.0}, {"gamma", 2.0}, {"q1", 3}, {"stages", 1}, {"c", 0.125}}},
  };
}

json load_config(const CliOptions& opt, json defaults) {
  if (!opt.config.empty()) {
    const std::string raw = read_text(opt.config);
    json user;
    try {
      user = json::parse(raw);
    } catch (const std::exception& e) {
      fail(Err::invalid_parameter, std::string("config is not valid JSON: ") + e.what());
    }
    if (!user.is_object()) fail(Err::invalid_parameter, "config must be a JSON object");
    if (user.contains("schema") && user["schema"] != 1)
      fail(Err::invalid_parameter, "unsupported config schema (this build reads schema 1)");
    defaults.merge_patch(user);
  }
  defaults["schema"] = 1;
  return defaults;
}

ConstructionParams params_from(const json& j) {
  ConstructionParams p;
  p.theta = num(j, "theta");
  p.gamma = num(j, "gamma");
  p.c = num(j, "c");
  p.q1 = integer(j, "q1");
  p.stages = integer(j, "stages");
  p.mhd = boolean(j, "mhd");
  p.budget = (long long)num(j, "budget");
  return p;
}

json threads_info() {
  json t{{"requested", nullptr}, {"effective", 1}};
  if (const char* env = std::getenv("LAB_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v < 1)
      fail(Err::invalid_parameter, "LAB_THREADS must be a positive integer");
    t["requested"] = v;  // transforms are single-threaded; 1 thread effective
  }
  return t;
}

// --------------------------------------------------------------- outcome ---

struct Outcome {
  std::vector<std::pair<std::string, std::string>> artifacts;
  json checks = json::array();
  json summary = json::object();
  int exit_code = 0;
  std::string reason;

  void check(const std::string& name, bool pass, json detail) {
    detail["name"] = name;
    detail["pass"] = pass;
    checks.push_back(std::move(detail));
    if (!pass && exit_code == 0) {
      exit_code = 1;
      reason = "check failed: " + name;
    }
  }
  void art(std::string name, std::string bytes) {
    artifacts.emplace_back(std::move(name), std::move(bytes));
  }
};

int write_run(const CliOptions& opt, const std::string& command, const json& cfg,
              const json& threads, const CliOptions& flags, Outcome& out) {
  const std::string digest = crc32_hex(crc32_of(cfg.dump()));
  std::error_code ec;
  fs::create_directories(opt.out, ec);
  fs::path dir;
  const std::string base = command + "-" + digest;
  for (int k = 1; k <= 9999 && dir.empty(); ++k) {
    fs::path cand = opt.out / (k == 1 ? base : base + "-" + std::to_string(k));
    if (fs::create_directory(cand, ec)) dir = cand;
  }
  if (dir.empty()) {
    std::fprintf(stderr, "%s: cannot allocate a run directory under %s\n", command.c_str(),
                 opt.out.string().c_str());
    return out.exit_code ? out.exit_code : 1;
  }

  write_text_create_new(dir / "config.json", cfg.dump(2) + "\n");
  json arts = json::object();
  for (const auto& [name, bytes] : out.artifacts) {
    write_text_create_new(dir / name, bytes);
    arts[name] = json{{"bytes", bytes.size()}, {"crc32", crc32_hex(crc32_of(bytes))}};
  }
  const json man{
      {"schema", 1},
      {"id", dir.filename().string()},
      {"command", command},
      {"config_digest", digest},
      {"threads", threads},
      {"seed_check", flags.seed_check},
      {"strict_boundaries", flags.strict_boundaries},
      {"artifacts", arts},
      {"checks", out.checks},
      {"summary", out.summary},
      {"exit_code", out.exit_code},
      {"reason", out.reason},
  };
  write_text_create_new(dir / "manifest.json", man.dump(2) + "\n");

  std::printf("%s -> %s (exit %d)%s%s\n", command.c_str(), dir.string().c_str(), out.exit_code,
              out.reason.empty() ? "" : ": ", out.reason.c_str());
  for (const json& c : out.checks)
    std::printf("  [%s] %s\n", c["pass"].get<bool>() ? "ok" : "FAILED",
                c["name"].get<std::string>().c_str());
  return out.exit_code;
}

int experiment(const CliOptions& opt, const std::string& command, json defaults,
               const std::function<Outcome(const json&, const CliOptions&)>& compute) {
  json threads{{"requested", nullptr}, {"effective", 1}};
  json cfg;
  Outcome out;
  try {
    threads = threads_info();
    cfg = load_config(opt, std::move(defaults));
  } catch (const Error& e) {
    if (!cfg.is_object()) cfg = json{{"schema", 1}, {"config_path", opt.config.string()}};
    out.exit_code = exit_code_for(e.code);
    out.reason = e.what();
    return write_run(opt, command, cfg, threads, opt, out);
  }
  try {
    out = compute(cfg, opt);
    if (opt.seed_check && out.exit_code == 0) {
      const Outcome again = compute(cfg, opt);
      std::string diverged;
      if (again.artifacts.size() != out.artifacts.size()) diverged = "artifact count";
      for (std::size_t i = 0; diverged.empty() && i < out.artifacts.size(); ++i)
        if (again.artifacts[i] != out.artifacts[i]) diverged = out.artifacts[i].first;
      out.check("determinism", diverged.empty(),
                json{{"diverged", diverged.empty() ? json() : json(diverged)}});
    }
  } catch (const Error& e) {
    out = Outcome{};
    out.exit_code = exit_code_for(e.code);
    out.reason = e.what();
  }
  return write_run(opt, command, cfg, threads, opt, out);
}

// --------------------------------------------------------- shared pieces ---

json table_json(const NormTable& t) {
  json rows = json::array();
  for (const NormRow& r : t.rows)
    rows.push_back(json{{"stage", r.stage}, {"q", r.q}, {"norm", r.norm},
                        {"normalized", r.normalized}});
  return json{{"label", t.label},
              {"r", std::isinf(t.r) ? json("inf") : json(t.r)},
              {"predicted_slope", t.predicted_slope},
              {"ratio", t.ratio},
              {"slope", t.slope},
              {"intercept", t.intercept},
              {"residual", t.residual},
              {"rows", rows}};
}

void norm_artifacts(Outcome& out, const InitialData& d, const json& cfg) {
  std::ostringstream csv;
  csv.precision(17);
  csv << "label,r,stage,q,norm,normalized\n";
  json tables = json::array();
  for (const json& rv : cfg.at("norm_orders")) {
    const double r = to_number_or_inf(rv, "norm_orders entry");
    std::vector<NormTable> ts{velocity_norm_table(d, r)};
    if (d.params.mhd) ts.push_back(magnetic_norm_table(d, r));
    for (const NormTable& t : ts) {
      tables.push_back(table_json(t));
      for (const NormRow& row : t.rows)
        csv << t.label << ',' << r_label(r) << ',' << row.stage << ',' << row.q << ','
            << row.norm << ',' << row.normalized << '\n';
      if (d.params.stages >= 3)
        out.check("uniform:" + t.label + ":r=" + r_label(r), t.ratio <= 4.0,
                  json{{"ratio", t.ratio}, {"bound", 4.0}});
    }
  }
  out.art("norms.json", json{{"schema", 1}, {"tables", tables}}.dump(2) + "\n");
  out.art("norms.csv", csv.str());
}

json block_json(const PsiBlock& b) {
  json box = json::array();
  for (int a = 0; a < 3; ++a) box.push_back(json::array({b.box.iv[a].lo, b.box.iv[a].hi}));
  return json{{"tag", b.tag},
              {"kind", symbol_name(b.kind)},
              {"shell", b.shell},
              {"coef", json::array({b.coef.real(), b.coef.imag()})},
              {"box", box}};
}

json blocks_json(const InitialData& d) {
  json stages = json::array();
  for (int j = 0; j < d.params.stages; ++j) {
    json u = json::array(), b = json::array();
    for (const PsiBlock& pb : d.u_blocks)
      if (pb.stage == j) u.push_back(block_json(pb));
    for (const PsiBlock& pb : d.b_blocks)
      if (pb.stage == j) b.push_back(block_json(pb));
    stages.push_back(json{{"stage", j}, {"q", d.q[j]}, {"velocity_blocks", u},
                          {"magnetic_blocks", b}});
  }
  return json{{"schema", 1}, {"stages", stages}};
}

double grad2_of(const SpectralField& f) {
  double s = 0.0;
  for (std::size_t i = 0; i < f.grid.size(); ++i) {
    const double lam2 = (double)knorm2(f.grid.k_of(i));
    s += lam2 * (std::norm(f.c[0][i]) + std::norm(f.c[1][i]) + std::norm(f.c[2][i]));
  }
  return kTwoPiCubed * s;
}

// ---------------------------------------------------------------- construct

Outcome compute_construct(const json& cfg, const CliOptions&) {
  Outcome out;
  const ConstructionParams p = params_from(cfg);
  const InitialData d = build_initial_data(p);

  out.check("solenoidal",
            divergence_residual(d.u0) <= 1e-12 && divergence_residual(d.b0) <= 1e-12,
            json{{"div_u", divergence_residual(d.u0)}, {"div_b", divergence_residual(d.b0)}});
  out.check("hermitian",
            hermitian_residual(d.u0) <= 1e-13 && hermitian_residual(d.b0) <= 1e-13,
            json{{"res_u", hermitian_residual(d.u0)}, {"res_b", hermitian_residual(d.b0)}});
  out.check("stage_count", (int)d.q.size() == p.stages,
            json{{"built", d.q.size()}, {"requested", p.stages}});

  out.art("blocks.json", blocks_json(d).dump(2) + "\n");
  norm_artifacts(out, d, cfg);

  const int n = integer(cfg, "grid_n");
  if (n > 0) {
    const DeskFields f = initial_fields_in_band(d, n, /*require_all=*/true);
    out.check("grid_fit", f.stages_in_band == p.stages,
              json{{"stages_in_band", f.stages_in_band}});
    out.art("initial.svf", svf_bytes(f.u0, p.mhd ? &f.b0 : nullptr));
  }
  out.summary = json{{"shells", d.q},
                     {"velocity_modes", d.u0.support_size()},
                     {"magnetic_modes", d.b0.support_size()}};
  return out;
}

// ------------------------------------------------------------------ verify

Outcome compute_verify(const json& cfg, const CliOptions&) {
  Outcome out;
  const ConstructionParams p = params_from(cfg);
  BlockTriOptions topt;
  topt.recip_tol = num(cfg, "recip_tol");
  topt.recip_dmax = integer(cfg, "recip_dmax");

  const std::vector<TrilinearReport> reports = verify_lemma_tril(p, topt);
  json jr = json::array();
  for (const TrilinearReport& r : reports) {
    json shells = json::array();
    for (const ShellValue& sv : r.shells) shells.push_back(json{{"q", sv.q}, {"value", sv.value}});
    jr.push_back(json{{"label", r.label},
                      {"predicted_exponent", r.predicted_exponent},
                      {"slope", r.slope},
                      {"intercept", r.intercept},
                      {"residual", r.residual},
                      {"sign_alternation", r.sign_alternation},
                      {"pass", r.pass},
                      {"note", r.note},
                      {"shells", shells}});
    out.check("slope:" + r.label, r.pass,
              json{{"predicted", r.predicted_exponent},
                   {"slope", r.slope},
                   {"tolerance", TrilinearReport::kSlopeTol},
                   {"note", r.note}});
  }
  out.art("trilinear_reports.json", json{{"schema", 1}, {"reports", jr}}.dump(2) + "\n");

  const InitialData d = build_initial_data(p);
  norm_artifacts(out, d, cfg);
  out.summary = json{{"shells", d.q}, {"reports", reports.size()}};
  return out;
}

// ------------------------------------------------------------------ region

Outcome compute_region(const json& cfg, const CliOptions& opt) {
  Outcome out;
  const int res = integer(cfg, "resolution");
  const std::string mode_s = cfg.at("mode").get<std::string>();
  if (mode_s != "nse" && mode_s != "mhd")
    fail(Err::invalid_parameter, "mode must be \"nse\" or \"mhd\"");
  const RegionMode mode = mode_s == "nse" ? RegionMode::nse : RegionMode::mhd;
  const double gamma = num(cfg, "gamma");
  RegionOptions ropt;
  ropt.strict_half_integer_bound = opt.strict_boundaries;

  const std::vector<RegionSample> grid = emit_region_grid(res, mode, gamma, ropt);
  const double area = region_area(grid);
  const auto segments = region_boundary(grid, res);

  out.art("region.csv", region_csv(grid));
  std::ostringstream bs;
  bs.precision(12);
  bs << "x0,s0,x1,s1\n";
  for (const auto& seg : segments)
    bs << seg[0] << ',' << seg[1] << ',' << seg[2] << ',' << seg[3] << '\n';
  out.art("boundary.csv", bs.str());

  out.check("area_sane", area > 0.0 && area < 1.0, json{{"area", area}});
  out.summary = json{{"resolution", res},     {"mode", mode_s},
                     {"gamma", gamma},        {"strict", opt.strict_boundaries},
                     {"area", area},          {"segments", segments.size()}};
  return out;
}

// ---------------------------------------------------------------- simulate

struct SimSetup {
  SimConfig sc;
  SpectralField u0{GridSpec(4)};
  SpectralField b0{GridSpec(4)};
};

SimSetup simulate_setup(const json& cfg) {
  SimSetup su;
  SimConfig& sc = su.sc;
  const std::string mode_s = cfg.at("mode").get<std::string>();
  if (mode_s != "nse" && mode_s != "mhd")
    fail(Err::invalid_parameter, "mode must be \"nse\" or \"mhd\"");
  sc.mode = mode_s == "nse" ? SimMode::nse : SimMode::mhd;
  sc.n = integer(cfg, "grid_n");
  sc.mu = num(cfg, "mu");
  sc.nu = num(cfg, "nu");
  const json& dt = cfg.at("dt");
  sc.dt = (dt.is_string() && dt == "auto") ? 0.0 : to_number(dt, "dt");
  sc.t_end = num(cfg, "t_end");
  if (!(sc.t_end > 0.0)) fail(Err::invalid_parameter, "t_end must be positive");
  sc.record_every = integer(cfg, "record_every");
  if (sc.record_every < 1) fail(Err::invalid_parameter, "record_every must be >= 1");
  sc.max_steps = (long long)num(cfg, "max_steps");
  sc.dealias = boolean(cfg, "dealias");
  sc.disable_nonlinearity = boolean(cfg, "disable_nonlinearity");
  for (const json& v : cfg.at("tracked_shells").at("u"))
    sc.tracked_u_shells.push_back((int)to_number(v, "tracked u shell"));
  for (const json& v : cfg.at("tracked_shells").at("b"))
    sc.tracked_b_shells.push_back((int)to_number(v, "tracked b shell"));
  if (sc.mode == SimMode::nse && !sc.tracked_b_shells.empty())
    fail(Err::invalid_parameter, "magnetic shells tracked in velocity-only mode");
  sc.record_besov = cfg.contains("besov");
  if (sc.record_besov) {
    sc.besov_s_u = sc.besov_s_b = num(cfg.at("besov"), "s");
    sc.besov_r = to_number_or_inf(cfg.at("besov").at("r"), "besov r");
    sc.besov_oversample = integer(cfg, "besov_oversample");
  }

  json dj = cfg.at("data");
  dj["mhd"] = sc.mode == SimMode::mhd;
  dj["budget"] = cfg.value("budget", 5000000.0);
  const ConstructionParams p = params_from(dj);
  const InitialData d = build_initial_data(p);
  const DeskFields f = initial_fields_in_band(d, sc.n, /*require_all=*/true);
  su.u0 = f.u0;
  su.b0 = f.b0;
  return su;
}

// Centered two-step probe of d/dt ||shell||^2 = 2 (production - dissipation)
// at the run's own dt, for the first tracked shell.
json budget_probe(const SimSetup& su) {
  const SimConfig& sc = su.sc;
  const bool magnetic = sc.tracked_u_shells.empty();
  const int q = magnetic ? sc.tracked_b_shells.front() : sc.tracked_u_shells.front();
  SimState s = sc.mode == SimMode::mhd ? make_state(sc, su.u0, su.b0) : make_state(sc, su.u0);
  const double dt = sc.dt > 0.0 ? sc.dt : auto_dt(s, sc);

  const double e0 = shell_energy(s, q, magnetic);
  step(s, sc, dt);
  const double p_mid = shell_production(s, sc, q, magnetic);
  const double visc = magnetic ? sc.nu : sc.mu;
  const double d_mid = visc * grad2_of(project_tilde(magnetic ? s.b : s.u, q));
  step(s, sc, dt);
  const double e2 = shell_energy(s, q, magnetic);

  const double fd = (e2 - e0) / (2.0 * dt);
  const double model = 2.0 * (p_mid - d_mid);
  const double scale = std::max(std::abs(fd), std::abs(model));
  const double rel = scale <= 1e-30 ? 0.0 : std::abs(fd - model) / scale;
  return json{{"shell", q},        {"magnetic", magnetic}, {"dt", dt},
              {"fd", fd},          {"model", model},       {"rel", rel},
              {"pass", rel <= 0.05}};
}

Outcome compute_simulate(const json& cfg, const CliOptions&) {
  Outcome out;
  const SimSetup su = simulate_setup(cfg);
  const SimConfig& sc = su.sc;

  SimState final_state;
  const SimHistory h = sc.mode == SimMode::mhd
                           ? run_simulation(sc, su.u0, su.b0, &final_state)
                           : run_simulation(sc, su.u0, &final_state);

  const double residual = energy_balance_residual(h);
  const double bound = sc.disable_nonlinearity ? 1e-10 : 1e-8;
  out.check("energy_balance", residual <= bound,
            json{{"residual", residual}, {"bound", bound}});
  out.check("solenoidal_final",
            divergence_residual(final_state.u) <= 1e-10 &&
                divergence_residual(final_state.b) <= 1e-10,
            json{{"div_u", divergence_residual(final_state.u)},
                 {"div_b", divergence_residual(final_state.b)}});
  out.check("hermitian_final",
            hermitian_residual(final_state.u) <= 1e-12 &&
                hermitian_residual(final_state.b) <= 1e-12,
            json{{"res_u", hermitian_residual(final_state.u)},
                 {"res_b", hermitian_residual(final_state.b)}});
  if (!sc.disable_nonlinearity &&
      !(sc.tracked_u_shells.empty() && sc.tracked_b_shells.empty())) {
    const json probe = budget_probe(su);
    out.check("shell_budget", probe["pass"].get<bool>(), probe);
  }

  out.art("history.csv", history_csv(h));
  if (boolean(cfg, "snapshots")) {
    out.art("initial.svf", svf_bytes(su.u0, sc.mode == SimMode::mhd ? &su.b0 : nullptr));
    out.art("final.svf",
            svf_bytes(final_state.u, sc.mode == SimMode::mhd ? &final_state.b : nullptr));
  }

  json probes = json::array();
  if (sc.record_besov) {
    for (const double target : {1e-3, 1e-2, 1e-1}) {
      if (target > sc.t_end * (1.0 + 1e-9)) continue;
      const HistoryRow* best = &h.rows.front();
      for (const HistoryRow& r : h.rows)
        if (std::abs(r.t - target) < std::abs(best->t - target)) best = &r;
      probes.push_back(json{{"target", target},
                            {"t", best->t},
                            {"besov_u", best->besov_u},
                            {"besov_b", best->besov_b}});
    }
  }
  out.summary = json{{"rows", h.rows.size()},
                     {"initial_energy", h.initial_energy},
                     {"final_t", final_state.t},
                     {"final_E_u", h.rows.back().e_u},
                     {"final_E_b", h.rows.back().e_b},
                     {"energy_residual", residual},
                     {"besov_probes", probes}};
  return out;
}

// ------------------------------------------------------------------ report

std::vector<std::string> split_lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream is(s);
  std::string line;
  while (std::getline(is, line)) out.push_back(line);
  return out;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream is(line);
  std::string cell;
  while (std::getline(is, cell, ',')) out.push_back(cell);
  return out;
}

std::string select_columns(const std::string& csv, const std::function<bool(const std::string&)>& keep) {
  const std::vector<std::string> lines = split_lines(csv);
  if (lines.empty()) fail(Err::io_failure, "empty csv artifact");
  const std::vector<std::string> header = split_csv(lines[0]);
  std::vector<std::size_t> cols;
  for (std::size_t i = 0; i < header.size(); ++i)
    if (keep(header[i])) cols.push_back(i);
  std::ostringstream os;
  for (const std::string& line : lines) {
    const std::vector<std::string> cells = split_csv(line);
    for (std::size_t i = 0; i < cols.size(); ++i) {
      if (i) os << ',';
      if (cols[i] < cells.size()) os << cells[cols[i]];
    }
    os << '\n';
  }
  return os.str();
}

std::string render_summary(const json& man) {
  std::ostringstream os;
  os << "run " << man.value("id", std::string("?")) << "\n";
  os << "command: " << man.value("command", std::string("?"))
     << "   config digest: " << man.value("config_digest", std::string("?")) << "\n";
  os << "exit: " << man.value("exit_code", -1);
  const std::string reason = man.value("reason", std::string());
  if (!reason.empty()) os << "   reason: " << reason;
  os << "\n\nchecks:\n";
  for (const json& c : man.value("checks", json::array())) {
    json detail = c;
    detail.erase("name");
    detail.erase("pass");
    os << "  [" << (c.value("pass", false) ? "ok" : "FAILED") << "] "
       << c.value("name", std::string("?")) << "  " << detail.dump() << "\n";
  }
  os << "\nartifacts:\n";
  for (const auto& [name, meta] : man.value("artifacts", json::object()).items())
    os << "  " << name << "  (" << meta.value("bytes", 0) << " bytes, crc32 "
       << meta.value("crc32", std::string("?")) << ")\n";
  os << "\nsummary: " << man.value("summary", json::object()).dump(2) << "\n";
  return os.str();
}

std::string slopes_csv(const json& reports) {
  std::ostringstream os;
  os.precision(17);
  os << "label,predicted,slope,intercept,residual,pass,note\n";
  for (const json& r : reports.at("reports"))
    os << r.value("label", std::string()) << ',' << r.value("predicted_exponent", 0.0) << ','
       << r.value("slope", 0.0) << ',' << r.value("intercept", 0.0) << ','
       << r.value("residual", 0.0) << ',' << (r.value("pass", false) ? 1 : 0) << ",\""
       << r.value("note", std::string()) << "\"\n";
  return os.str();
}

std::string norm_tables_csv(const json& norms) {
  std::ostringstream os;
  os.precision(17);
  os << "label,r,predicted_slope,slope,ratio\n";
  for (const json& t : norms.at("tables")) {
    const json& r = t.at("r");
    os << t.value("label", std::string()) << ','
       << (r.is_string() ? r.get<std::string>() : std::to_string(r.get<double>())) << ','
       << t.value("predicted_slope", 0.0) << ',' << t.value("slope", 0.0) << ','
       << t.value("ratio", 0.0) << '\n';
  }
  return os.str();
}

void write_or_verify(const fs::path& p, const std::string& body) {
  std::error_code ec;
  if (fs::exists(p, ec)) {
    if (read_text(p) != body)
      fail(Err::io_failure, "existing report file " + p.string() + " differs from a fresh render");
    return;
  }
  write_text_create_new(p, body);
}

}  // namespace

// ------------------------------------------------------------ public api ---

int exit_code_for(Err code) {
  switch (code) {
    case Err::invalid_parameter: return 2;
    case Err::resolution: return 3;
    case Err::insufficient_data: return 4;
    case Err::blow_up: return 5;
    case Err::missing_artifact: return 6;
    case Err::cfl_rejected: return 7;
    default: return 1;
  }
}

int cmd_construct(const CliOptions& opt) {
  return experiment(opt, "construct", construct_defaults(), compute_construct);
}
int cmd_verify(const CliOptions& opt) {
  return experiment(opt, "verify", verify_defaults(), compute_verify);
}
int cmd_region(const CliOptions& opt) {
  return experiment(opt, "region", region_defaults(), compute_region);
}
int cmd_simulate(const CliOptions& opt) {
  return experiment(opt, "simulate", simulate_defaults(), compute_simulate);
}

int cmd_report(const CliOptions& opt) {
  try {
    if (opt.config.empty())
      fail(Err::missing_artifact, "report needs --config pointing at a run dir or manifest.json");
    fs::path mpath = opt.config;
    std::error_code ec;
    if (fs::is_directory(mpath, ec)) mpath /= "manifest.json";
    json man;
    try {
      man = json::parse(read_text(mpath));
    } catch (const json::exception& e) {
      fail(Err::io_failure, "manifest is not valid JSON: " + std::string(e.what()));
    }
    const fs::path dir = mpath.parent_path();

    std::map<std::string, std::string> loaded;
    for (const auto& [name, meta] : man.value("artifacts", json::object()).items()) {
      const std::string bytes = read_text(dir / name);
      if (crc32_hex(crc32_of(bytes)) != meta.value("crc32", std::string()))
        fail(Err::io_failure, "artifact " + name + " does not match its recorded digest");
      loaded[name] = bytes;
    }

    std::vector<std::pair<std::string, std::string>> files;
    files.emplace_back("summary.txt", render_summary(man));
    if (loaded.count("trilinear_reports.json"))
      files.emplace_back("slopes.csv", slopes_csv(json::parse(loaded["trilinear_reports.json"])));
    if (loaded.count("norms.json"))
      files.emplace_back("norm_tables.csv", norm_tables_csv(json::parse(loaded["norms.json"])));
    if (loaded.count("history.csv"))
      files.emplace_back("shell_timeseries.csv",
                         select_columns(loaded["history.csv"], [](const std::string& h) {
                           return h == "t" || h.rfind("ue_", 0) == 0 || h.rfind("up_", 0) == 0 ||
                                  h.rfind("be_", 0) == 0 || h.rfind("bp_", 0) == 0;
                         }));
    if (loaded.count("region.csv"))
      files.emplace_back("region_scatter.csv",
                         select_columns(loaded["region.csv"], [](const std::string& h) {
                           return h == "inv_r" || h == "s" || h == "admissible";
                         }));

    for (const auto& [name, bytes] : files) write_or_verify(dir / "report" / name, bytes);
    std::fputs(files.front().second.c_str(), stdout);
    return 0;
  } catch (const Error& e) {
    std::fprintf(stderr, "report: %s\n", e.what());
    return exit_code_for(e.code);
  }
}

int run_command(const std::string& name, const CliOptions& opt) {
  if (name == "construct") return cmd_construct(opt);
  if (name == "verify") return cmd_verify(opt);
  if (name == "region") return cmd_region(opt);
  if (name == "simulate") return cmd_simulate(opt);
  if (name == "report") return cmd_report(opt);
  std::fprintf(stderr, "unknown command: %s\n", name.c_str());
  return 2;
}

}  // namespace lab
