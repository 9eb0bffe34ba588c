#include "lab/solver.hpp"

#include <cmath>
#include <sstream>

#include "lab/norms.hpp"
#include "lab/shells.hpp"
#include "lab/transform.hpp"

namespace lab {
namespace {

constexpr double kTwoPiCubed = 248.05021344239853;  // (2 pi)^3

// Dealiased per-axis wavenumber cap; the Nyquist plane is excluded anyway.
int keep_limit(const GridSpec& g, bool dealias) {
  return dealias ? g.n / 3 : g.band_limit();
}

void apply_mask(SpectralField& f, bool dealias) {
  const GridSpec& g = f.grid;
  const int kd = keep_limit(g, dealias);
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    const K3 k = g.k_of(idx);
    const bool kill = !g.in_band(k) || std::abs(k[0]) > kd || std::abs(k[1]) > kd ||
                      std::abs(k[2]) > kd;
    if (kill)
      for (int c = 0; c < 3; ++c) f.c[c][idx] = cplx{0.0, 0.0};
  }
}

// ||grad f||_2^2 by Plancherel.
double grad_energy(const SpectralField& f) {
  double s = 0.0;
  for (std::size_t idx = 0; idx < f.grid.size(); ++idx) {
    const double lam2 = (double)knorm2(f.grid.k_of(idx));
    s += lam2 * (std::norm(f.c[0][idx]) + std::norm(f.c[1][idx]) + std::norm(f.c[2][idx]));
  }
  return kTwoPiCubed * s;
}

std::array<std::vector<double>, 3> synth_field(const SpectralField& f, double* vmax) {
  std::array<std::vector<double>, 3> out;
  for (int c = 0; c < 3; ++c) {
    out[c] = synth_component(f.c[c], f.grid.n, f.grid.n);
    if (vmax)
      for (double v : out[c]) *vmax = std::max(*vmax, std::abs(v));
  }
  return out;
}

// Analysis of a real product buffer back onto the grid layout.
std::vector<cplx> analyze(std::vector<double> prod, int n) {
  std::vector<cplx> buf(prod.size());
  for (std::size_t i = 0; i < prod.size(); ++i) buf[i] = cplx{prod[i], 0.0};
  fft3(buf, n, -1);
  return buf;
}

void scale_in_place(SpectralField& f, const std::vector<double>& e) {
  for (int c = 0; c < 3; ++c)
    for (std::size_t i = 0; i < f.c[c].size(); ++i) f.c[c][i] *= e[i];
}

SpectralField scaled(const SpectralField& f, const std::vector<double>& e) {
  SpectralField out = f;
  scale_in_place(out, e);
  return out;
}

// g = filter(q)^2 applied to f; <N, g> in L^2.
double shell_inner(const SpectralField& nf, const SpectralField& f, int q, bool fat) {
  double s = 0.0;
  for (std::size_t idx = 0; idx < f.grid.size(); ++idx) {
    const double absk = std::sqrt((double)knorm2(f.grid.k_of(idx)));
    const double m = fat ? tilde_multiplier(q, absk) : shell_multiplier(q, absk);
    if (m == 0.0) continue;
    const double m2 = m * m;
    for (int c = 0; c < 3; ++c)
      s += m2 * (nf.c[c][idx] * std::conj(f.c[c][idx])).real();
  }
  return kTwoPiCubed * s;
}

}  // namespace

SimState make_state(const SimConfig& cfg, const SpectralField& u0, const SpectralField& b0) {
  if (u0.grid.n != cfg.n) fail(Err::shape_mismatch, "initial velocity grid differs from config n");
  SimState s;
  s.grid = u0.grid;
  s.u = u0;
  s.mhd = cfg.mode == SimMode::mhd;
  if (s.mhd) {
    if (b0.grid.n != cfg.n)
      fail(Err::shape_mismatch, "initial magnetic grid differs from config n");
    s.b = b0;
  } else {
    s.b = SpectralField(s.grid);
  }
  apply_mask(s.u, cfg.dealias);
  apply_mask(s.b, cfg.dealias);
  project_leray(s.u);
  project_leray(s.b);
  const double hr = std::max(hermitian_residual(s.u), hermitian_residual(s.b));
  if (hr > 1e-10) fail(Err::symmetry_violation, "initial data is not Hermitian");
  return s;
}

SimState make_state(const SimConfig& cfg, const SpectralField& u0) {
  return make_state(cfg, u0, SpectralField(u0.grid));
}

DeskFields initial_fields_in_band(const InitialData& d, int n, bool require_all) {
  DeskFields out;
  out.grid = GridSpec(n);
  out.u0 = SpectralField(out.grid);
  out.b0 = SpectralField(out.grid);
  const long long band = n / 3;  // must survive the dealiasing mask
  for (int j = 0; j < (int)d.q.size(); ++j) {
    std::vector<PsiBlock> ub = d.u_piece_high(j);
    for (const PsiBlock& p : d.u_piece_low(j)) ub.push_back(p);
    std::vector<PsiBlock> bb = d.b_piece(j);
    bool fits = true;
    auto check = [&](const std::vector<PsiBlock>& blocks) {
      for (const PsiBlock& p : blocks)
        for (int a = 0; a < 3; ++a)
          if (std::llabs(p.box.iv[a].lo) > band || std::llabs(p.box.iv[a].hi) > band)
            fits = false;
    };
    check(ub);
    check(bb);
    if (!fits) {
      if (require_all)
        fail(Err::resolution, "stage shell q=" + std::to_string(d.q[j]) +
                                  " does not fit the dealiased band of n=" + std::to_string(n));
      continue;
    }
    for (auto& [k, v] : materialize(ub, d.params.budget).modes)
      out.u0.add({(int)k[0], (int)k[1], (int)k[2]}, v);
    if (!bb.empty())
      for (auto& [k, v] : materialize(bb, d.params.budget).modes)
        out.b0.add({(int)k[0], (int)k[1], (int)k[2]}, v);
    ++out.stages_in_band;
  }
  if (out.stages_in_band == 0)
    fail(Err::resolution, "no construction stage fits the dealiased band of n=" + std::to_string(n));
  return out;
}

Tendencies nonlinear_rhs(const SimState& s, const SimConfig& cfg) {
  const GridSpec& g = s.grid;
  const int n = g.n;
  Tendencies out;
  out.du = SpectralField(g);
  out.db = SpectralField(g);
  out.ddiss_u = grad_energy(s.u);
  out.ddiss_b = s.mhd ? cfg.nu * grad_energy(s.b) : 0.0;
  if (cfg.disable_nonlinearity) return out;

  const auto ux = synth_field(s.u, &out.vmax);
  std::array<std::vector<double>, 3> bx;
  if (s.mhd) bx = synth_field(s.b, &out.vmax);

  // Momentum: du_j = -i k_i T_ij with T_ij = u_i u_j - b_i b_j (divergence
  // form; equals the convective form because the state is solenoidal).
  std::array<std::array<std::vector<cplx>, 3>, 3> that;
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j) {
      std::vector<double> prod(g.size());
      if (s.mhd) {
        for (std::size_t x = 0; x < prod.size(); ++x)
          prod[x] = ux[i][x] * ux[j][x] - bx[i][x] * bx[j][x];
      } else {
        for (std::size_t x = 0; x < prod.size(); ++x) prod[x] = ux[i][x] * ux[j][x];
      }
      that[i][j] = analyze(std::move(prod), n);
    }
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    const K3 k = g.k_of(idx);
    for (int j = 0; j < 3; ++j) {
      cplx acc{0.0, 0.0};
      for (int i = 0; i < 3; ++i) {
        const auto& tij = i <= j ? that[i][j] : that[j][i];
        acc += (double)k[i] * tij[idx];
      }
      out.du.c[j][idx] = cplx{0.0, -1.0} * acc;  // -i k_i T_ij
    }
  }
  project_leray(out.du);
  apply_mask(out.du, cfg.dealias);

  if (s.mhd) {
    // Induction: db = i k x w with w = u x b (curl form of b.grad u - u.grad b),
    // exactly divergence-free.
    std::array<std::vector<cplx>, 3> what;
    for (int c = 0; c < 3; ++c) {
      const int i = (c + 1) % 3, j = (c + 2) % 3;
      std::vector<double> prod(g.size());
      for (std::size_t x = 0; x < prod.size(); ++x)
        prod[x] = ux[i][x] * bx[j][x] - ux[j][x] * bx[i][x];
      what[c] = analyze(std::move(prod), n);
    }
    for (std::size_t idx = 0; idx < g.size(); ++idx) {
      const K3 k = g.k_of(idx);
      for (int c = 0; c < 3; ++c) {
        const int i = (c + 1) % 3, j = (c + 2) % 3;
        out.db.c[c][idx] =
            cplx{0.0, 1.0} * ((double)k[i] * what[j][idx] - (double)k[j] * what[i][idx]);
      }
    }
    apply_mask(out.db, cfg.dealias);
  }
  return out;
}

Tendencies rhs(const SimState& s, const SimConfig& cfg) {
  Tendencies out = nonlinear_rhs(s, cfg);
  for (std::size_t idx = 0; idx < s.grid.size(); ++idx) {
    const double lam2 = (double)knorm2(s.grid.k_of(idx));
    for (int c = 0; c < 3; ++c) {
      out.du.c[c][idx] -= cfg.mu * lam2 * s.u.c[c][idx];
      if (s.mhd) out.db.c[c][idx] -= cfg.nu * lam2 * s.b.c[c][idx];
    }
  }
  return out;
}

double auto_dt(const SimState& s, const SimConfig& cfg) {
  double vmax = 0.0;
  synth_field(s.u, &vmax);
  if (s.mhd) synth_field(s.b, &vmax);
  const double scale = vmax * keep_limit(s.grid, cfg.dealias);
  if (!(scale > 1e-12)) return cfg.t_end / 100.0;
  return cfg.cfl_safety * cfg.cfl_limit / scale;
}

void step(SimState& s, const SimConfig& cfg, double dt) {
  if (!(dt > 0.0)) fail(Err::invalid_parameter, "step size must be positive");
  const GridSpec& g = s.grid;
  const Tendencies k1 = nonlinear_rhs(s, cfg);
  if (!std::isfinite(k1.vmax))
    fail(Err::blow_up, "non-finite field entering the step at t=" + std::to_string(s.t));
  const double adv = dt * k1.vmax * keep_limit(g, cfg.dealias);
  if (adv > cfg.cfl_limit * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "dt=" << dt << " violates the advective bound: dt*vmax*kmax=" << adv << " > "
       << cfg.cfl_limit;
    fail(Err::cfl_rejected, os.str());
  }
  const double e_before = spectral_energy(s.u) + (s.mhd ? spectral_energy(s.b) : 0.0);

  // Half/full-step diffusion semigroups (exact integrating factors).
  std::vector<double> eu_h(g.size()), eu_f(g.size()), eb_h, eb_f;
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    const double lam2 = (double)knorm2(g.k_of(idx));
    eu_h[idx] = std::exp(-cfg.mu * lam2 * dt * 0.5);
    eu_f[idx] = eu_h[idx] * eu_h[idx];
  }
  if (s.mhd) {
    eb_h.resize(g.size());
    eb_f.resize(g.size());
    for (std::size_t idx = 0; idx < g.size(); ++idx) {
      const double lam2 = (double)knorm2(g.k_of(idx));
      eb_h[idx] = std::exp(-cfg.nu * lam2 * dt * 0.5);
      eb_f[idx] = eb_h[idx] * eb_h[idx];
    }
  }

  SimState stage = s;
  auto set_stage = [&](const SpectralField& u, const SpectralField& b, double t) {
    stage.u = u;
    if (s.mhd) stage.b = b;
    stage.t = t;
  };

  // u2 = E (u + dt/2 k1)
  SpectralField tu = s.u, tb = s.b;
  tu.axpy(0.5 * dt, k1.du);
  scale_in_place(tu, eu_h);
  if (s.mhd) {
    tb.axpy(0.5 * dt, k1.db);
    scale_in_place(tb, eb_h);
  }
  set_stage(tu, tb, s.t + 0.5 * dt);
  const Tendencies k2 = nonlinear_rhs(stage, cfg);

  // u3 = E u + dt/2 k2
  tu = scaled(s.u, eu_h);
  tu.axpy(0.5 * dt, k2.du);
  if (s.mhd) {
    tb = scaled(s.b, eb_h);
    tb.axpy(0.5 * dt, k2.db);
  }
  set_stage(tu, tb, s.t + 0.5 * dt);
  const Tendencies k3 = nonlinear_rhs(stage, cfg);

  // u4 = E^2 u + dt E k3
  tu = scaled(s.u, eu_f);
  tu.axpy(dt, scaled(k3.du, eu_h));
  if (s.mhd) {
    tb = scaled(s.b, eb_f);
    tb.axpy(dt, scaled(k3.db, eb_h));
  }
  set_stage(tu, tb, s.t + dt);
  const Tendencies k4 = nonlinear_rhs(stage, cfg);

  // u_{n+1} = E^2 u + dt/6 (E^2 k1 + 2 E k2 + 2 E k3 + k4)
  scale_in_place(s.u, eu_f);
  s.u.axpy(dt / 6.0, scaled(k1.du, eu_f));
  s.u.axpy(dt / 3.0, scaled(k2.du, eu_h));
  s.u.axpy(dt / 3.0, scaled(k3.du, eu_h));
  s.u.axpy(dt / 6.0, k4.du);
  project_leray(s.u);
  apply_mask(s.u, cfg.dealias);
  if (s.mhd) {
    scale_in_place(s.b, eb_f);
    s.b.axpy(dt / 6.0, scaled(k1.db, eb_f));
    s.b.axpy(dt / 3.0, scaled(k2.db, eb_h));
    s.b.axpy(dt / 3.0, scaled(k3.db, eb_h));
    s.b.axpy(dt / 6.0, k4.db);
    apply_mask(s.b, cfg.dealias);
  }
  s.diss_u += dt / 6.0 * (k1.ddiss_u + 2.0 * k2.ddiss_u + 2.0 * k3.ddiss_u + k4.ddiss_u);
  s.diss_b += dt / 6.0 * (k1.ddiss_b + 2.0 * k2.ddiss_b + 2.0 * k3.ddiss_b + k4.ddiss_b);
  s.t += dt;

  const double e_after = spectral_energy(s.u) + (s.mhd ? spectral_energy(s.b) : 0.0);
  if (!std::isfinite(e_after) || !(e_after <= cfg.blowup_factor * (e_before + 1e-300)))
    fail(Err::blow_up, "solution left the trusted regime at t=" + std::to_string(s.t));
}

double shell_energy(const SimState& s, int q, bool magnetic, bool fat) {
  const SpectralField& f = magnetic ? s.b : s.u;
  double acc = 0.0;
  for (std::size_t idx = 0; idx < f.grid.size(); ++idx) {
    const double absk = std::sqrt((double)knorm2(f.grid.k_of(idx)));
    const double m = fat ? tilde_multiplier(q, absk) : shell_multiplier(q, absk);
    if (m == 0.0) continue;
    acc += m * m * (std::norm(f.c[0][idx]) + std::norm(f.c[1][idx]) + std::norm(f.c[2][idx]));
  }
  return kTwoPiCubed * acc;
}

double shell_production(const SimState& s, const SimConfig& cfg, int q, bool magnetic, bool fat) {
  const Tendencies nl = nonlinear_rhs(s, cfg);
  return shell_inner(magnetic ? nl.db : nl.du, magnetic ? s.b : s.u, q, fat);
}

double field_besov_distance(const SpectralField& f, const SpectralField& ref, double s, double r,
                            int oversample) {
  if (!(f.grid == ref.grid)) fail(Err::shape_mismatch, "distance needs matching grids");
  SpectralField diff = f;
  diff.axpy(cplx{-1.0, 0.0}, ref);
  return besov_norm(diff, s, r, INFINITY, oversample);
}

namespace {

HistoryRow make_row(const SimState& s, const SimConfig& cfg, const SimHistory& meta,
                    const SpectralField& u0, const SpectralField& b0) {
  HistoryRow row;
  row.t = s.t;
  row.e_u = kTwoPiCubed * spectral_energy(s.u);
  row.e_b = s.mhd ? kTwoPiCubed * spectral_energy(s.b) : 0.0;
  row.diss_u = s.diss_u;
  row.diss_b = s.diss_b;
  const bool want_production =
      !meta.u_shells.empty() || (s.mhd && !meta.b_shells.empty());
  Tendencies nl;
  if (want_production) nl = nonlinear_rhs(s, cfg);
  for (int q : meta.u_shells) {
    row.u_shell_e.push_back(shell_energy(s, q, false));
    row.u_shell_p.push_back(want_production ? shell_inner(nl.du, s.u, q, true) : 0.0);
  }
  if (s.mhd)
    for (int q : meta.b_shells) {
      row.b_shell_e.push_back(shell_energy(s, q, true));
      row.b_shell_p.push_back(want_production ? shell_inner(nl.db, s.b, q, true) : 0.0);
    }
  if (cfg.record_besov) {
    row.besov_u = field_besov_distance(s.u, u0, cfg.besov_s_u, cfg.besov_r, cfg.besov_oversample);
    if (s.mhd)
      row.besov_b = field_besov_distance(s.b, b0, cfg.besov_s_b, cfg.besov_r, cfg.besov_oversample);
  }
  return row;
}

}  // namespace

SimHistory run_simulation(const SimConfig& cfg, const SpectralField& u0, const SpectralField& b0,
                          SimState* final_state) {
  SimState s = make_state(cfg, u0, b0);
  const int top = top_shell(s.grid);
  for (int q : cfg.tracked_u_shells)
    if (q > top)
      fail(Err::resolution, "tracked shell q=" + std::to_string(q) +
                                " exceeds the dealiased band (top shell " + std::to_string(top) +
                                ")");
  for (int q : cfg.tracked_b_shells)
    if (q > top)
      fail(Err::resolution, "tracked magnetic shell q=" + std::to_string(q) +
                                " exceeds the dealiased band (top shell " + std::to_string(top) +
                                ")");
  SimHistory h;
  h.mode = cfg.mode;
  h.n = cfg.n;
  h.mu = cfg.mu;
  h.nu = cfg.nu;
  h.dealias = cfg.dealias;
  h.u_shells = cfg.tracked_u_shells;
  h.b_shells = cfg.tracked_b_shells;
  const SpectralField uref = s.u, bref = s.b;  // post-mask initial state
  h.initial_energy = kTwoPiCubed * (spectral_energy(s.u) + spectral_energy(s.b));
  h.rows.push_back(make_row(s, cfg, h, uref, bref));
  long long steps = 0;
  while (s.t < cfg.t_end * (1.0 - 1e-12)) {
    if (steps >= cfg.max_steps)
      fail(Err::budget_exceeded, "max_steps exhausted before t_end");
    double dt = cfg.dt > 0.0 ? cfg.dt : auto_dt(s, cfg);
    dt = std::min(dt, cfg.t_end - s.t);
    step(s, cfg, dt);
    ++steps;
    const bool last = s.t >= cfg.t_end * (1.0 - 1e-12);
    if (steps % cfg.record_every == 0 || last)
      h.rows.push_back(make_row(s, cfg, h, uref, bref));
  }
  if (final_state) *final_state = s;
  return h;
}

SimHistory run_simulation(const SimConfig& cfg, const SpectralField& u0, SimState* final_state) {
  return run_simulation(cfg, u0, SpectralField(u0.grid), final_state);
}

double energy_balance_residual(const SimHistory& h) {
  if (h.rows.empty()) fail(Err::insufficient_data, "empty history");
  const double e0 = h.initial_energy;
  double worst = 0.0;
  for (const HistoryRow& r : h.rows) {
    const double lhs = r.e_u + r.e_b + 2.0 * (h.mu * r.diss_u + r.diss_b);
    worst = std::max(worst, std::abs(lhs - e0) / e0);
  }
  return worst;
}

std::string history_csv(const SimHistory& h) {
  std::ostringstream os;
  os.precision(17);
  os << "t,E_u,E_b,diss_u,diss_b";
  for (int q : h.u_shells) os << ",ue_q" << q << ",up_q" << q;
  for (int q : h.b_shells) os << ",be_q" << q << ",bp_q" << q;
  os << ",besov_u,besov_b\n";
  for (const HistoryRow& r : h.rows) {
    os << r.t << ',' << r.e_u << ',' << r.e_b << ',' << r.diss_u << ',' << r.diss_b;
    for (std::size_t i = 0; i < r.u_shell_e.size(); ++i)
      os << ',' << r.u_shell_e[i] << ',' << r.u_shell_p[i];
    for (std::size_t i = 0; i < r.b_shell_e.size(); ++i)
      os << ',' << r.b_shell_e[i] << ',' << r.b_shell_p[i];
    os << ',' << r.besov_u << ',' << r.besov_b << '\n';
  }
  return os.str();
}

}  // namespace lab
